#include "pnt/bounds.hpp"

#include <algorithm>

namespace pnt {

std::string to_string(Kind k) {
  switch (k) {
    case Kind::psi: return "psi";
    case Kind::theta: return "theta";
    case Kind::pi: return "pi";
  }
  return "?";
}

Kind parse_kind(const std::string& s) {
  if (s == "psi") return Kind::psi;
  if (s == "theta") return Kind::theta;
  if (s == "pi") return Kind::pi;
  throw std::invalid_argument("unknown kind: " + s);
}

Rational Rational::parse(const std::string& s) {
  auto to_long = [&](const std::string& t) {
    size_t used = 0;
    long v = std::stol(t, &used);
    if (used != t.size()) throw std::invalid_argument("bad rational: " + s);
    return v;
  };
  Rational r;
  if (auto slash = s.find('/'); slash != std::string::npos) {
    r.num = to_long(s.substr(0, slash));
    r.den = to_long(s.substr(slash + 1));
  } else if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string frac = s.substr(dot + 1);
    if (frac.size() > 15) throw std::invalid_argument("too many decimals: " + s);
    std::string whole = s.substr(0, dot);
    bool neg = !whole.empty() && whole[0] == '-';
    r.den = 1;
    for (size_t i = 0; i < frac.size(); ++i) r.den *= 10;
    long w = whole.empty() || whole == "-" ? 0 : to_long(whole);
    long f = frac.empty() ? 0 : to_long(frac);
    r.num = (neg ? -1 : 1) * (std::labs(w) * r.den + f);
  } else {
    r.num = to_long(s);
  }
  if (r.den <= 0) throw std::invalid_argument("bad denominator: " + s);
  return r;
}

std::string Rational::str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }

AsymptoticBound AsymptoticBound::make(Kind kind, const std::string& A, const std::string& B, const std::string& C,
                                      const std::string& R, const Enclosure& log_x0) {
  AsymptoticBound b;
  b.kind = kind;
  b.A = XReal::parse(A, Dir::up);
  b.B = Rational::parse(B);
  b.C = XReal::parse(C, Dir::down);
  b.R = XReal::parse(R, Dir::down);
  b.log_x0 = log_x0;
  b.validate();
  return b;
}

void AsymptoticBound::validate() const {
  if (A.sign() <= 0) throw DomainError("A must be positive");
  if (C.sign() <= 0) throw DomainError("C must be positive");
  if (R.sign() <= 0) throw DomainError("R must be positive");
  if (log_x0.hi() < Enclosure::ln2().lo()) throw DomainError("x0 must be at least 2");
}

namespace {

// t^B, with integer and half-integer exponents done by repeated products
Enclosure rational_power(const Enclosure& t, const Enclosure& sqrt_t, const Rational& B) {
  if (B.den == 1) return pow(t, B.num);
  if (B.den == 2) return pow(sqrt_t, B.num);
  return pow(t, B.value());
}

}  // namespace

Enclosure eval_asymp_enclosure(const AsymptoticBound& bound, const Enclosure& log_x) {
  Enclosure t = log_x / Enclosure(bound.R);
  Enclosure s = sqrt(t);
  return Enclosure(bound.A) * rational_power(t, s, bound.B) * exp(-(Enclosure(bound.C) * s));
}

XReal eval_asymp(const AsymptoticBound& bound, const Enclosure& log_x, Dir d, bool* below_threshold) {
  if (below_threshold) *below_threshold = certainly_lt(log_x, bound.log_x0) || log_x.lo() < bound.log_x0.hi();
  return eval_asymp_enclosure(bound, log_x).bound(d);
}

Enclosure asymp_decreasing_log_threshold(const AsymptoticBound& bound) {
  Enclosure B = bound.B.value();
  return Enclosure(4L) * sqr(B) * Enclosure(bound.R) / sqr(Enclosure(bound.C));
}

PlainForm to_plain_form(const AsymptoticBound& bound) {
  Enclosure R(bound.R);
  PlainForm f;
  f.A = (Enclosure(bound.A) / pow(R, bound.B.value())).hi();
  f.B = bound.B;
  f.C = (Enclosure(bound.C) / sqrt(R)).lo();
  return f;
}

XReal eval_plain(const PlainForm& f, const Enclosure& log_x, Dir d) {
  Enclosure s = sqrt(log_x);
  Enclosure v = Enclosure(f.A) * rational_power(log_x, s, f.B) * exp(-(Enclosure(f.C) * s));
  return v.bound(d);
}

// With u = sqrt(log x): d/du log g = (-2a u^2 + c u + 2b) / u.
DecreasingRegion decreasing_from(const Enclosure& a, const Enclosure& b, const Enclosure& c) {
  if (a.lo().sign() < 0) throw DomainError("decreasing_from needs a >= 0");
  if (!c.positive()) throw DomainError("decreasing_from needs c > 0");
  DecreasingRegion r;
  if (a.is_point() && a.lo().is_zero()) {
    if (b.lo().sign() >= 0) {
      r.shape = DecreasingRegion::Shape::never;
      return r;
    }
    r.shape = DecreasingRegion::Shape::below;
    r.sqrt_log_threshold = Enclosure(-2L) * b / c;
    if (!b.negative()) r.sqrt_log_threshold = Enclosure(XReal(0L), r.sqrt_log_threshold.hi());
    return r;
  }
  if (!a.positive()) throw DomainError("a must be zero or certainly positive");
  Enclosure disc = sqr(c) / Enclosure(4L) + Enclosure(4L) * a * b;
  if (disc.negative()) {
    r.shape = DecreasingRegion::Shape::always;
    return r;
  }
  Enclosure d = Enclosure(max(disc.lo(), XReal(0L)), disc.hi());
  r.shape = DecreasingRegion::Shape::beyond;
  r.sqrt_log_threshold = c / (Enclosure(4L) * a) + sqrt(d) / (Enclosure(2L) * a);
  return r;
}

bool DecreasingRegion::certainly_decreasing_at(const Enclosure& u) const {
  switch (shape) {
    case Shape::always: return true;
    case Shape::never: return false;
    case Shape::beyond: return certainly_lt(sqrt_log_threshold, u);
    case Shape::below: return certainly_lt(u, sqrt_log_threshold);
  }
  return false;
}

Enclosure g_value(const Enclosure& a, const Enclosure& b, const Enclosure& c, const Enclosure& log_x) {
  return exp(-(a * log_x) + b * log(log_x) + c * sqrt(log_x));
}

// ---------------------------------------------------------------- step tables

StepRow StepBoundTable::make_row(const std::string& log_x, const std::string& eps, std::string provenance) {
  StepRow r;
  r.log_x = XReal::parse(log_x, Dir::up);
  r.eps = XReal::parse(eps, Dir::up);
  r.log_x_text = log_x;
  r.eps_text = eps;
  r.provenance = std::move(provenance);
  if (r.eps.sign() < 0) throw DomainError("negative eps in row " + log_x);
  return r;
}

StepBoundTable::StepBoundTable(Kind kind, std::vector<StepRow> rows, std::string provenance, std::string R)
    : kind_(kind), rows_(std::move(rows)), provenance_(std::move(provenance)), R_(std::move(R)) {
  if (rows_.empty()) throw EmptyTable("step table has no rows");
  for (size_t i = 1; i < rows_.size(); ++i)
    if (!(rows_[i - 1].log_x < rows_[i].log_x))
      throw OrderError("rows not strictly increasing at log x = " + rows_[i].log_x_text);
}

size_t StepBoundTable::index_at(const XReal& log_x) const {
  if (rows_.empty()) throw EmptyTable("step table has no rows");
  if (log_x < rows_.front().log_x) throw BelowTable("log x = " + log_x.str(10) + " is below the first row");
  auto it = std::upper_bound(rows_.begin(), rows_.end(), log_x,
                             [](const XReal& v, const StepRow& r) { return v < r.log_x; });
  return static_cast<size_t>(it - rows_.begin()) - 1;
}

std::vector<size_t> StepBoundTable::non_monotone_rows() const {
  std::vector<size_t> out;
  for (size_t i = 1; i < rows_.size(); ++i)
    if (rows_[i - 1].eps < rows_[i].eps) out.push_back(i);
  return out;
}

XReal eval_step(const StepBoundTable& table, const XReal& log_x) { return table.rows()[table.index_at(log_x)].eps; }

// A row valid from row.log_x <= lo holds at every point of the enclosure.
XReal eval_step(const StepBoundTable& table, const Enclosure& log_x) { return eval_step(table, log_x.lo()); }

// ---------------------------------------------------------------- partitions

Partition::Partition(std::vector<Enclosure> points) : points_(std::move(points)) {
  if (points_.empty()) throw DomainError("partition needs at least one point");
  for (size_t i = 1; i < points_.size(); ++i)
    if (!certainly_lt(points_[i - 1], points_[i])) throw OrderError("partition points must be strictly increasing");
}

Partition Partition::refine_between(const std::vector<XReal>& base, const Enclosure& lo, const Enclosure& hi,
                                    int pieces) {
  if (pieces < 1) throw DomainError("refinement must be at least 1");
  std::vector<Enclosure> knots{lo};
  for (const XReal& b : base)
    if (lo.hi() < b && b < hi.lo()) knots.emplace_back(b);
  if (certainly_lt(lo, hi)) knots.push_back(hi);
  std::vector<Enclosure> pts{knots.front()};
  for (size_t i = 1; i < knots.size(); ++i) {
    Enclosure step = (knots[i] - knots[i - 1]) / Enclosure(pieces);
    for (int k = 1; k < pieces; ++k) {
      Enclosure p = knots[i - 1] + step * Enclosure(k);
      // keep interior points exact where possible
      pts.emplace_back(p.mid());
    }
    pts.push_back(knots[i]);
  }
  return Partition(std::move(pts));
}

}  // namespace pnt

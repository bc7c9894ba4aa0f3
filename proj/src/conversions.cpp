#include "pnt/conversions.hpp"

#include <algorithm>

#include "pnt/special.hpp"

namespace pnt {

namespace {

// a >= b for enclosures of the same quantity or clearly larger values.
bool at_least(const Enclosure& a, const Enclosure& b) { return a.lo() >= b.lo() && a.hi() >= b.hi(); }

Enclosure emax(const Enclosure& a, const Enclosure& b) { return max(a, b); }

void require_mu_hypotheses(const AsymptoticBound& theta) {
  if (theta.B.num * 2 < 3 * theta.B.den) throw HypothesisViolated("B >= 3/2");
  Enclosure need = Enclosure(1L) + sqr(Enclosure(theta.C)) / (Enclosure(16L) * Enclosure(theta.R));
  if (theta.B.value().lo() < need.hi()) throw HypothesisViolated("B >= 1 + C^2/(16R)");
}

Enclosure infinite_tail(const Enclosure& L1) { return Enclosure(1L) / (L1 + log(L1) - Enclosure(1L)); }

// (log x2 / x2) * integral_{x1}^{x2} dt / log^2 t
Enclosure finite_tail(const Enclosure& L1, const Enclosure& L2) {
  if (!certainly_lt(L1, L2)) return Enclosure(0L);
  return L2 * j_integral(L1, L2, L2);
}

Enclosure tail_term(const Enclosure& L1, const std::optional<Enclosure>& L2) {
  if (!L2) return infinite_tail(L1);
  if (certainly_lt(*L2, L1)) throw BranchMisuse("x2 < x1");
  Enclosure edge = L1 + log(L1);
  if (certainly_le(*L2, edge) || L2->hi() <= edge.hi()) return finite_tail(L1, *L2);
  if (certainly_lt(edge, *L2)) return infinite_tail(L1);
  // undecided branch: both bounds hold where they apply, take the larger
  return max(finite_tail(L1, *L2), infinite_tail(L1));
}

// disc * (x0 log x1) / (eps(x1) x1 log x0), assembled in log space
Enclosure disc_term(const AnchorDiscrepancy& disc, const Enclosure& L1, const Enclosure& eps1) {
  const Enclosure& L0 = disc.log_x0;
  return disc.value * exp(L0 - L1) * L1 / (L0 * eps1);
}

void require_x1(const AnchorDiscrepancy& disc, const Enclosure& L1) {
  if (!at_least(L1, disc.log_x0)) throw HypothesisViolated("x1 >= x0");
  if (!at_least(L1, log(Enclosure(14L)))) throw HypothesisViolated("x1 >= 14");
}

XReal eps_at(const ThetaNumSource& theta, const Enclosure& b) {
  try {
    return theta.at(b);
  } catch (const BelowTable& e) {
    throw PartitionNotCovered(std::string("theta table does not cover the partition: ") + e.what());
  }
}

}  // namespace

Enclosure signed_discrepancy(const ExactAnchor& anchor) {
  const Enclosure& x = anchor.x0;
  Enclosure L = log(x);
  Enclosure pi_x(anchor.pi_x0);
  return ((pi_x - anchor.li_x0) * L - anchor.theta_x0 + x) / x;
}

AnchorDiscrepancy AnchorDiscrepancy::from_anchor(const ExactAnchor& anchor) {
  AnchorDiscrepancy d;
  d.log_x0 = anchor.log_x0();
  d.value = abs(signed_discrepancy(anchor));
  d.source = "anchor " + anchor.name;
  return d;
}

AnchorDiscrepancy AnchorDiscrepancy::from_bounds(const Enclosure& log_x0, const XReal& eps_theta, const XReal& eps_pi) {
  AnchorDiscrepancy d;
  d.log_x0 = log_x0;
  d.value = Enclosure(XReal(0L), xr_arith(Op::add, eps_theta, eps_pi, Dir::up));
  d.source = "eps_theta + eps_pi at x0";
  return d;
}

Bkwln_a1a2 Bkwln_a1a2::defaults() {
  Bkwln_a1a2 a;
  a.a1 = XReal::parse("1.0000000193378", Dir::up);
  a.a2 = XReal::parse("1.1", Dir::up);
  a.valid_from_log_x0 = Enclosure(30L);
  a.provenance = "calibrated: reproduces nu(e^30) <= 6.3376e-7 for (121.096, 3/2, 2); not an independently sourced value";
  return a;
}

Enclosure nu_asymp(const AsymptoticBound& psi, const Bkwln_a1a2& a, const Enclosure& log_x0) {
  Enclosure R(psi.R), C(psi.C), B = psi.B.value();
  if (!certainly_lt(sqr(C) / (Enclosure(8L) * R), B)) throw HypothesisViolated("B > C^2/(8R)");
  if (!at_least(log_x0, a.valid_from_log_x0)) throw HypothesisViolated("log x0 >= validity of a1, a2");
  const Enclosure& L = log_x0;
  Enclosure lead = pow(R / L, B) * exp(C * sqrt(L / R)) / Enclosure(psi.A);
  Enclosure corr = Enclosure(a.a1) * L * exp(-L / Enclosure(2L)) + Enclosure(a.a2) * L * exp(-(Enclosure(2L) * L) / Enclosure(3L));
  Enclosure nu = lead * corr;
  return Enclosure(max(nu.lo(), XReal(0L)), nu.hi());
}

AsymptoticBound psi_to_theta_asymp(const AsymptoticBound& psi, const Bkwln_a1a2& a) {
  if (psi.kind != Kind::psi) throw DomainError("psi_to_theta_asymp expects a psi bound");
  Enclosure nu = nu_asymp(psi, a, psi.log_x0);
  AsymptoticBound t = psi;
  t.kind = Kind::theta;
  t.A = (Enclosure(psi.A) * (Enclosure(1L) + nu)).hi();
  return t;
}

Enclosure mu_asymp(const AsymptoticBound& theta, const AnchorDiscrepancy& disc, const Enclosure& log_x1) {
  require_mu_hypotheses(theta);
  Enclosure R(theta.R), C(theta.C);
  Enclosure shift = C / (Enclosure(2L) * sqrt(R));
  Enclosure x1_min = emax(theta.log_x0, sqr(Enclosure(1L) + shift));
  if (!at_least(log_x1, x1_min)) throw HypothesisViolated("x1 >= max(x0, exp((1 + C/(2 sqrt R))^2))");
  if (!at_least(log_x1, disc.log_x0)) throw HypothesisViolated("x1 >= x0");
  Enclosure eps1 = eval_asymp_enclosure(theta, log_x1);
  Enclosure first = disc_term(disc, log_x1, eps1);
  Enclosure s = sqrt(log_x1);
  Enclosure second = Enclosure(2L) * dawson(s - shift) / s;
  Enclosure mu = first + second;
  return Enclosure(max(mu.lo(), XReal(0L)), mu.hi());
}

AsymptoticBound theta_to_pi_asymp(const AsymptoticBound& theta, const AnchorDiscrepancy& disc, const Enclosure& log_x1) {
  if (theta.kind != Kind::theta) throw DomainError("theta_to_pi_asymp expects a theta bound");
  Enclosure mu = mu_asymp(theta, disc, log_x1);
  AsymptoticBound p = theta;
  p.kind = Kind::pi;
  p.A = (Enclosure(theta.A) * (Enclosure(1L) + mu)).hi();
  p.log_x0 = log_x1;
  return p;
}

AsymptoticBound psi_to_pi_asymp(const AsymptoticBound& psi, const Bkwln_a1a2& a, const AnchorDiscrepancy& disc,
                                const Enclosure& log_x1) {
  return theta_to_pi_asymp(psi_to_theta_asymp(psi, a), disc, log_x1);
}

ThetaFromPsi psi_to_theta_num(const XReal& eps_psi, const Enclosure& log_x0) {
  if (!certainly_lt(Enclosure::ln2(), log_x0)) throw DomainError("psi_to_theta_num needs x0 > 2");
  auto xp = [&](long num, long den) { return exp(-(Enclosure::ratio(num, den) * log_x0)); };
  Enclosure c1 = Enclosure::parse("1.00000002"), c2 = Enclosure::parse("0.94");
  Enclosure e = Enclosure(eps_psi) + c1 * (xp(1, 2) + xp(2, 3) + xp(4, 5)) + c2 * (xp(3, 4) + xp(5, 6) + xp(9, 10));
  return {e.hi(), eps_psi};
}

// ---------------------------------------------------------------- numerical

ThetaNumSource::ThetaNumSource(StepBoundTable table, std::optional<AsymptoticBound> envelope)
    : table_(std::move(table)), envelope_(std::move(envelope)) {
  if (envelope_) {
    if (envelope_->kind != Kind::theta) throw DomainError("theta envelope must be a theta bound");
    envelope_from_ = emax(envelope_->log_x0, asymp_decreasing_log_threshold(*envelope_));
  }
}

XReal ThetaNumSource::at(const Enclosure& log_x) const {
  XReal e = eval_step(table_, log_x);
  if (envelope_ && certainly_le(envelope_from_, log_x)) e = min(e, eval_asymp(*envelope_, log_x, Dir::up));
  return e;
}

Enclosure mu_num(const AnchorDiscrepancy& disc, const ThetaNumSource& theta, const Partition& part,
                 const Enclosure& log_x1, const std::optional<Enclosure>& log_x2) {
  if (!part.front().overlaps(disc.log_x0) || !part.back().overlaps(log_x1))
    throw PartitionNotCovered("partition must run from log x0 to log x1");
  require_x1(disc, log_x1);
  Enclosure tail = tail_term(log_x1, log_x2);
  Enclosure eps1(eps_at(theta, log_x1));
  const auto& b = part.points();
  Enclosure sum;
  for (size_t i = 0; i + 1 < b.size(); ++i) sum += Enclosure(eps_at(theta, b[i])) * j_integral(b[i], b[i + 1], log_x1);
  Enclosure mu = disc_term(disc, log_x1, eps1) + log_x1 * sum / eps1 + tail;
  return Enclosure(max(mu.lo(), XReal(0L)), mu.hi());
}

Enclosure mu_num(const AnchorDiscrepancy& disc, const StepBoundTable& table, const Partition& part,
                 const Enclosure& log_x1, const std::optional<Enclosure>& log_x2) {
  return mu_num(disc, ThetaNumSource(table), part, log_x1, log_x2);
}

XReal pi_num_on_interval(const ThetaNumSource& theta, const Partition& part, const AnchorDiscrepancy& disc,
                         const Enclosure& log_x1, const std::optional<Enclosure>& log_x2) {
  Enclosure mu = mu_num(disc, theta, part, log_x1, log_x2);
  return (Enclosure(eps_at(theta, log_x1)) * (Enclosure(1L) + mu)).hi();
}

XReal pi_num_on_interval(const StepBoundTable& table, const Partition& part, const AnchorDiscrepancy& disc,
                         const Enclosure& log_x1, const std::optional<Enclosure>& log_x2) {
  return pi_num_on_interval(ThetaNumSource(table), part, disc, log_x1, log_x2);
}

std::vector<StitchedPiece> stitch_sweep(const ThetaNumSource& theta, const AnchorDiscrepancy& disc,
                                        const std::vector<Enclosure>& points, const std::vector<bool>& is_sub) {
  if (points.empty() || points.size() != is_sub.size()) throw DomainError("stitch_sweep: bad point list");
  if (!points.front().overlaps(disc.log_x0)) throw PartitionNotCovered("partition must start at log x0");
  for (size_t i = 1; i < points.size(); ++i)
    if (!certainly_lt(points[i - 1], points[i])) throw OrderError("partition points must be strictly increasing");

  std::vector<size_t> subs;
  for (size_t i = 0; i < points.size(); ++i)
    if (is_sub[i]) subs.push_back(i);

  std::vector<StitchedPiece> out;
  out.reserve(subs.size());
  // scaled running sum T(s) = e^{-s} sum eps_i integral_{b_i}^{b_{i+1}} e^u/u^2 du
  Enclosure T;
  Enclosure s = points.front();
  XReal eps_prev = eps_at(theta, points.front());
  size_t next_sub = 0;
  for (size_t i = 0; i < points.size(); ++i) {
    if (i > 0) {
      const Enclosure& b = points[i];
      T = T * exp(s - b) + Enclosure(eps_prev) * j_integral(points[i - 1], b, b);
      s = b;
      eps_prev = eps_at(theta, b);
    }
    if (!is_sub[i]) continue;
    const Enclosure& L1 = points[i];
    require_x1(disc, L1);
    ++next_sub;
    std::optional<Enclosure> L2;
    if (next_sub < subs.size()) L2 = points[subs[next_sub]];
    Enclosure eps1(eps_prev);
    Enclosure mu = disc_term(disc, L1, eps1) + L1 * T / eps1 + tail_term(L1, L2);
    mu = Enclosure(max(mu.lo(), XReal(0L)), mu.hi());
    StitchedPiece piece{L1, L2, eps_prev, mu, (eps1 * (Enclosure(1L) + mu)).hi()};
    out.push_back(std::move(piece));
  }
  return out;
}

StitchedResult pi_num_stitched(const ThetaNumSource& theta, const AnchorDiscrepancy& disc,
                               const std::vector<Enclosure>& subdivisions, int refinement) {
  if (subdivisions.empty()) throw DomainError("need b'_1 = log x1");
  if (refinement < 1) throw DomainError("refinement must be at least 1");
  std::vector<Enclosure> knots{disc.log_x0};
  std::vector<bool> knot_sub{false};
  for (const StepRow& r : theta.table().rows()) {
    Enclosure p(r.log_x);
    if (certainly_lt(disc.log_x0, p) && certainly_lt(p, subdivisions.front())) {
      knots.push_back(p);
      knot_sub.push_back(false);
    }
  }
  for (const Enclosure& b : subdivisions) {
    if (knots.size() == 1 && b.overlaps(knots.front())) {
      knot_sub.back() = true;
      continue;
    }
    knots.push_back(b);
    knot_sub.push_back(true);
  }
  std::vector<Enclosure> pts{knots.front()};
  std::vector<bool> sub{knot_sub.front()};
  for (size_t i = 1; i < knots.size(); ++i) {
    if (!certainly_lt(knots[i - 1], knots[i])) throw OrderError("subdivision points must increase");
    Enclosure step = (knots[i] - knots[i - 1]) / Enclosure(refinement);
    for (int k = 1; k < refinement; ++k) {
      pts.emplace_back((knots[i - 1] + step * Enclosure(k)).mid());
      sub.push_back(false);
    }
    pts.push_back(knots[i]);
    sub.push_back(knot_sub[i]);
  }
  StitchedResult res;
  res.pieces = stitch_sweep(theta, disc, pts, sub);
  res.eps = res.pieces.front().eps_pi;
  for (const auto& p : res.pieces) res.eps = max(res.eps, p.eps_pi);
  return res;
}

// ---------------------------------------------------------------- dominance

DominanceReport dominates(const StepBoundTable& table, const AsymptoticBound& bound, const Enclosure& log_lo,
                          const Enclosure& log_hi, DominanceMode mode) {
  DominanceReport rep;
  if (!certainly_lt(log_lo, log_hi)) return rep;
  Enclosure thr = asymp_decreasing_log_threshold(bound);
  const auto& rows = table.rows();
  auto curve_lo = [&](const Enclosure& L) { return eval_asymp(bound, L, Dir::down); };
  auto flag = [&](size_t i, const Enclosure& at, const XReal& curve) {
    if (!rep.first_violation) {
      rep.first_violation = i;
      rep.violation_log_x = at;
      rep.violation_step = rows[i].eps;
      rep.violation_curve = curve;
    }
    if (rep.violations.empty() || rep.violations.back() != i) rep.violations.push_back(i);
    rep.holds = false;
  };
  for (size_t i = 0; i < rows.size(); ++i) {
    Enclosure a(rows[i].log_x);
    std::optional<Enclosure> b;
    if (i + 1 < rows.size()) b = Enclosure(rows[i + 1].log_x);
    if (!certainly_lt(a, log_hi)) break;
    if (b && certainly_le(*b, log_lo)) continue;
    if (certainly_lt(a, log_lo)) a = log_lo;
    Enclosure end = (b && certainly_lt(*b, log_hi)) ? *b : log_hi;
    ++rep.rows_checked;
    const XReal& eps = rows[i].eps;
    if (mode == DominanceMode::certified) {
      // the curve rises then falls, so its minimum on [a, end] is at an end
      XReal c = min(curve_lo(a), curve_lo(end));
      if (eps > c) flag(i, a, c);
      continue;
    }
    if (certainly_le(thr, a)) {
      XReal c = curve_lo(a);
      if (eps > c) flag(i, a, c);
      continue;
    }
    // curve not yet decreasing: check the prefix on a grid, then the turning point
    Enclosure stop = certainly_lt(end, thr) ? end : Enclosure(thr.hi());
    const long nodes = 10000;
    Enclosure h = (stop - a) / Enclosure(nodes);
    for (long k = 0; k <= nodes; ++k) {
      Enclosure L = a + h * Enclosure(k);
      XReal c = curve_lo(L);
      if (eps > c) {
        flag(i, L, c);
        break;
      }
    }
    if (certainly_lt(stop, end)) {
      XReal c = curve_lo(stop);
      if (eps > c) flag(i, stop, c);
    }
  }
  return rep;
}

}  // namespace pnt

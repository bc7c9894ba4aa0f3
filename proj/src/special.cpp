#include "pnt/special.hpp"

#include <cmath>

namespace pnt {

namespace {

Enclosure nonneg_tail(const XReal& bound) { return Enclosure(XReal(0L), bound); }

XReal two_pow(long e) {
  XReal r(Prec{64});
  mpfr_set_ui_2exp(r.raw(), 1, e, MPFR_RNDN);
  return r;
}

// ---------------------------------------------------------------- Dawson

// e^{-y^2} * sum_k y^{2k+1} / (k! (2k+1)); all terms positive.
Enclosure dawson_taylor(const XReal& y) {
  mpfr_prec_t p = working_precision();
  PrecisionScope scope(p + 40);
  Enclosure Y(y);
  Enclosure y2 = sqr(Y);
  Enclosure pk(1L);  // y^{2k} / k!
  Enclosure sum = Y;
  XReal eps = two_pow(-(p + 24));
  double yy = y.to_double(Dir::up);
  yy *= yy;
  for (long k = 1;; ++k) {
    pk = pk * y2 / Enclosure(k);
    Enclosure term = pk * Y / Enclosure(2 * k + 1);
    sum += term;
    // later ratios are <= y^2/(k+1) <= 1/2, so the tail is at most one term
    if (yy / static_cast<double>(k + 1) <= 0.5 &&
        term.hi() <= xr_arith(Op::mul, sum.lo(), eps, Dir::down)) {
      sum += nonneg_tail(term.hi());
      break;
    }
  }
  return exp(-y2) * sum;
}

// sum_{k<n} (2k-1)!! / (2^{k+1} y^{2k+1}) with remainder from integration by
// parts split at c = y / sqrt(2); n is capped so that 2n + 1 <= c^2.
Enclosure dawson_asymptotic(const XReal& y) {
  mpfr_prec_t p = working_precision();
  PrecisionScope scope(p + 32);
  Enclosure Y(y);
  Enclosure y2 = sqr(Y);
  double yy = y.to_double(Dir::down);
  yy *= yy;
  long n_max = static_cast<long>(std::floor((yy / 2.0 - 1.0) / 2.0)) - 1;
  if (n_max < 1) throw PrecisionExhausted("dawson asymptotic branch out of range");
  Enclosure term = Enclosure(1L) / (Enclosure(2L) * Y);
  Enclosure sum;
  XReal eps = two_pow(-(p + 16));
  long n = 0;
  while (n < n_max) {
    sum += term;
    ++n;
    term = term * Enclosure(2 * n - 1) / (Enclosure(2L) * y2);
    if (term.hi() <= xr_arith(Op::mul, sum.lo(), eps, Dir::down)) break;
  }
  // integral remainder in [0, 2 * next term]
  Enclosure c = sqrt(y2 / Enclosure(2L));
  XReal boundary = (exp(-y2 / Enclosure(2L)) * (Enclosure::ratio(55, 100) + Enclosure(n) / (Enclosure(2L) * c))).hi();
  Enclosure err(xr_arith(Op::sub, XReal(0L), boundary, Dir::down),
                xr_arith(Op::add, xr_arith(Op::mul, term.hi(), XReal(2L), Dir::up), boundary, Dir::up));
  return sum + err;
}

// ---------------------------------------------------------------- J integral

// integral_a^b e^u/u^2 du via Ei(b) - Ei(a) - e^b/b + e^a/a.
Enclosure i_series(const XReal& a, const XReal& b) {
  mpfr_prec_t p = working_precision();
  double bd = b.to_double(Dir::up);
  double gap = xr_arith(Op::sub, b, a, Dir::down).to_double(Dir::down);
  long guard = 48 + static_cast<long>(2 * std::log2(bd + 2.0));
  if (gap < 1.0) guard += static_cast<long>(std::ceil(-std::log2(gap)));
  PrecisionScope scope(p + guard);
  Enclosure A(a), B(b);
  Enclosure e = ei_difference(B, A);
  return e - exp(B) / B + exp(A) / A;
}

// integral_a^b e^u/u^2 du by repeated integration by parts:
// e^u sum_{k<n} (k+1)!/u^{k+2} between a and b, plus
// (n+1)! integral e^u u^{-(n+2)} in [0, (n+1)!(e^b b^-m - e^a a^-m)/(1 - m/a)].
Enclosure i_asymptotic(const XReal& a, const XReal& b) {
  mpfr_prec_t p = working_precision();
  double ad = a.to_double(Dir::down);
  double gap = xr_arith(Op::sub, b, a, Dir::down).to_double(Dir::down);
  long guard = 48;
  if (gap < 1.0) guard += static_cast<long>(std::ceil(-std::log2(gap)));
  PrecisionScope scope(p + guard);
  Enclosure A(a), B(b);
  Enclosure ia = Enclosure(1L) / A, ib = Enclosure(1L) / B;
  Enclosure ta = sqr(ia), tb = sqr(ib);  // (k+1)!/u^{k+2} at k = 0
  Enclosure sa, sb;
  XReal eps = two_pow(-(p + guard / 2));
  XReal first = ta.lo();
  long n = 0;
  long n_cap = static_cast<long>(0.75 * ad) - 2;
  for (;;) {
    sa += ta;
    sb += tb;
    ++n;
    // next term coefficient (n+1)!
    ta = ta * Enclosure(n + 1) * ia;
    tb = tb * Enclosure(n + 1) * ib;
    if (n >= n_cap || ta.hi() <= xr_arith(Op::mul, first, eps, Dir::down)) break;
  }
  long m = n + 2;
  Enclosure ea = exp(A), eb = exp(B);
  Enclosure main = eb * sb - ea * sa;
  // ta, tb now hold (n+1)!/u^{n+2} = (n+1)! u^{-m}
  Enclosure rem_hi = (eb * tb - ea * ta) / (Enclosure(1L) - Enclosure(m) / A);
  return main + nonneg_tail(max(rem_hi.hi(), XReal(0L)));
}

double asymptotic_threshold() { return std::max(40.0, 0.75 * static_cast<double>(working_precision() + 40)); }

// integral_a^b e^u/u^2 du for exact 1 < a <= b.
Enclosure i_point(const XReal& a, const XReal& b) {
  if (a == b) return Enclosure(0L);
  XReal gap = xr_arith(Op::sub, b, a, Dir::down);
  mpfr_prec_t p = working_precision();
  // very short interval: monotone bracket (b-a) e^a/b^2 <= I <= (b-a) e^b/a^2
  if (gap < two_pow(-(p + 8)) && a.to_double() < 1e6) {
    PrecisionScope scope(p + 16);
    Enclosure A(a), B(b), w = Enclosure(b) - Enclosure(a);
    return hull(w * exp(A) / sqr(B), w * exp(B) / sqr(A));
  }
  double th = asymptotic_threshold();
  if (b.to_double(Dir::up) <= th) return i_series(a, b);
  if (a.to_double(Dir::down) >= th) return i_asymptotic(a, b);
  XReal mid(Prec{64});
  mpfr_set_d(mid.raw(), th, MPFR_RNDN);
  return i_series(a, mid) + i_asymptotic(mid, b);
}

}  // namespace

Enclosure dawson(const XReal& y) {
  if (y.sign() < 0) throw DomainError("dawson needs y >= 0");
  if (y.is_zero()) return Enclosure(0L);
  mpfr_prec_t p = working_precision();
  double yy = y.to_double();
  yy *= yy;
  XReal target = two_pow(-(p / 2));
  if (yy >= std::log(2.0) * static_cast<double>(p + 64)) {
    Enclosure r = dawson_asymptotic(y);
    if (r.rel_width() <= target) return r;
    if (yy > 4000) throw PrecisionExhausted("dawson enclosure too wide");
  }
  return dawson_taylor(y);
}

Enclosure dawson(const Enclosure& y) {
  if (y.hi().sign() < 0) throw DomainError("dawson needs y >= 0");
  XReal lo = max(y.lo(), XReal(0L));
  if (y.is_point()) return dawson(lo);
  // increasing up to the maximum near 0.92414, decreasing after
  static const double kRise = 0.9241, kFall = 0.9242;
  Enclosure dl = dawson(lo), dh = dawson(y.hi());
  if (y.hi().to_double(Dir::up) <= kRise) return Enclosure(dl.lo(), dh.hi());
  if (lo.to_double(Dir::down) >= kFall) return Enclosure(dh.lo(), dl.hi());
  // max value is 1/(2 y*) with y* >= 0.9241
  XReal peak = xr_arith(Op::div, XReal(1L), XReal::parse("1.8482", Dir::down), Dir::up);
  return Enclosure(min(dl.lo(), dh.lo()), max(peak, max(dl.hi(), dh.hi())));
}

Enclosure ei_difference(const Enclosure& u, const Enclosure& v) {
  if (!v.positive() || !u.positive()) throw DomainError("ei_difference needs positive arguments");
  mpfr_prec_t p = working_precision();
  Enclosure pu(1L), pv(1L);  // u^k/k!, v^k/k!
  Enclosure sum = log(u / v);
  XReal eps = two_pow(-(p + 8));
  double ud = u.hi().to_double(Dir::up);
  for (long k = 1;; ++k) {
    pu = pu * u / Enclosure(k);
    pv = pv * v / Enclosure(k);
    Enclosure term = (pu - pv) / Enclosure(k);
    sum += term;
    Enclosure tu = pu / Enclosure(k);
    // u^j/(j j!) ratios are <= u/(k+1) <= 1/2 from here on
    if (ud / static_cast<double>(k + 1) <= 0.5 &&
        tu.hi() <= xr_arith(Op::mul, abs(sum).hi(), eps, Dir::down)) {
      sum += nonneg_tail(tu.hi());
      break;
    }
    if (k > 100000) throw PrecisionExhausted("Ei series did not converge");
  }
  return sum;
}

Enclosure ei(const Enclosure& u) {
  if (!u.positive()) throw DomainError("ei needs u > 0");
  mpfr_prec_t p = working_precision();
  Enclosure pu(1L);
  Enclosure sum = Enclosure::euler_gamma() + log(u);
  XReal eps = two_pow(-(p + 8));
  double ud = u.hi().to_double(Dir::up);
  for (long k = 1;; ++k) {
    pu = pu * u / Enclosure(k);
    Enclosure term = pu / Enclosure(k);
    sum += term;
    if (ud / static_cast<double>(k + 1) <= 0.5 &&
        term.hi() <= xr_arith(Op::mul, abs(sum).hi(), eps, Dir::down)) {
      sum += nonneg_tail(term.hi());
      break;
    }
  }
  return sum;
}

Enclosure li_moderate(const Enclosure& x) {
  if (x.lo() < XReal(2L)) throw DomainError("li_moderate needs x >= 2");
  if (x.hi() > XReal::parse("1e18", Dir::up)) throw DomainError("li_moderate needs x <= 1e18");
  if (x.is_point() && x.lo() == XReal(2L)) return Enclosure(0L);
  mpfr_prec_t p = working_precision();
  PrecisionScope scope(p + 32);
  Enclosure r = ei_difference(log(x), Enclosure::ln2());
  return Enclosure(max(r.lo(), XReal(0L)), r.hi());
}

Enclosure li_offset() { return ei(Enclosure::ln2()); }

Enclosure j_integral(const Enclosure& a, const Enclosure& b, const Enclosure& s) {
  if (a.lo() <= XReal(1L)) throw DomainError("j_integral needs a > 1");
  if (certainly_lt(b, a)) throw DomainError("j_integral needs a <= b");
  mpfr_prec_t p = working_precision();
  Enclosure lo_part, hi_part;
  // increasing in b, decreasing in a
  if (a.hi() <= b.lo()) {
    lo_part = i_point(a.hi(), b.lo());
  } else {
    lo_part = -i_point(b.lo(), a.hi());
  }
  hi_part = (a.lo() == a.hi() && b.lo() == b.hi()) ? lo_part : i_point(a.lo(), b.hi());
  PrecisionScope scope(p + 8);
  Enclosure lo = Enclosure(max(lo_part.lo(), XReal(0L))) * exp(-Enclosure(s.hi()));
  Enclosure hi = Enclosure(hi_part.hi()) * exp(-Enclosure(s.lo()));
  return Enclosure(lo.lo(), max(lo.lo(), hi.hi()));
}

}  // namespace pnt

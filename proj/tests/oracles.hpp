// Independent reference computations used only by the tests.
#pragma once

#include <mpfr.h>

#include <cstdint>
#include <vector>

#include "pnt/xreal.hpp"

namespace oracle {

using pnt::Dir;
using pnt::Enclosure;
using pnt::XReal;

// Correctly rounded Ei at high precision.
inline Enclosure eint(const XReal& u, mpfr_prec_t bits = 1024) {
  XReal lo(pnt::Prec{bits}), hi(pnt::Prec{bits});
  mpfr_eint(lo.raw(), u.get(), MPFR_RNDD);
  mpfr_eint(hi.raw(), u.get(), MPFR_RNDU);
  return Enclosure(lo, hi);
}

// sum (-1)^k 2^k y^{2k+1} / (2k+1)!!, alternating once terms shrink.
inline Enclosure dawson_alternating(const XReal& y, mpfr_prec_t bits) {
  pnt::PrecisionScope ps(bits);
  Enclosure Y(y), y2 = Y * Y;
  Enclosure term = Y, sum = Y;
  double yy = y.to_double() * y.to_double();
  for (long k = 0;; ++k) {
    term = -(term * Enclosure(2L) * y2 / Enclosure(2 * k + 3));
    sum += term;
    if (2.0 * yy < 2.0 * k + 5 && abs(term).hi() < XReal::parse("1e-60", Dir::down)) {
      XReal t = abs(term).hi();
      return sum + Enclosure(pnt::xr_arith(pnt::Op::sub, XReal(0L), t, Dir::down), t);
    }
  }
}

// First n terms of 1/(2y) + 1/(4y^3) + 3/(8y^5) + ... bracketed by twice the
// next term (large y only).
inline Enclosure dawson_asymptotic_terms(const XReal& y, int n) {
  pnt::PrecisionScope ps(256);
  Enclosure Y(y), y2 = Y * Y;
  Enclosure t = Enclosure(1L) / (Enclosure(2L) * Y), s;
  for (int k = 0; k < n; ++k) {
    s += t;
    t = t * Enclosure(2 * k + 1) / (Enclosure(2L) * y2);
  }
  return s + Enclosure(XReal(0L), (t * Enclosure(2L) + Enclosure(XReal::parse("1e-100", Dir::up))).hi());
}

// Midpoint/trapezoid bracket of a convex integrand f on [a, b] with n panels.
template <class F>
Enclosure convex_quadrature(F f, const Enclosure& a, const Enclosure& b, long n) {
  Enclosure h = (b - a) / Enclosure(n);
  Enclosure lo, hi;
  Enclosure fprev = f(a);
  for (long i = 0; i < n; ++i) {
    Enclosure x0 = a + h * Enclosure(i);
    Enclosure xm = x0 + h / Enclosure(2L);
    Enclosure f1 = f(x0 + h);
    lo += h * f(xm);
    hi += h * (fprev + f1) / Enclosure(2L);
    fprev = f1;
  }
  return Enclosure(lo.lo(), hi.hi());
}

// e^{-y^2} integral_0^y e^{t^2} dt: quadrature on [y-1, y], crude bound below.
inline Enclosure dawson_quadrature(const XReal& y, long n) {
  pnt::PrecisionScope ps(128);
  Enclosure Y(y), y2 = Y * Y;
  Enclosure a = Y - Enclosure(1L);
  auto f = [&](const Enclosure& t) { return exp(t * t - y2); };
  Enclosure main = convex_quadrature(f, a, Y, n);
  Enclosure rest(XReal(0L), (a * exp(a * a - y2)).hi());
  return main + rest;
}

inline Enclosure j_eint(const Enclosure& a, const Enclosure& b, const Enclosure& s) {
  pnt::PrecisionScope ps(1024);
  XReal am = a.mid(), bm = b.mid(), sm = s.mid();
  Enclosure A(am), B(bm), S(sm);
  return (eint(bm) - eint(am) - exp(B) / B + exp(A) / A) * exp(-S);
}

inline Enclosure j_quadrature(const Enclosure& a, const Enclosure& b, const Enclosure& s, long n) {
  pnt::PrecisionScope ps(160);
  Enclosure am(a.mid()), bm(b.mid()), sm(s.mid());
  auto f = [&](const Enclosure& u) { return exp(u - sm) / (u * u); };
  return convex_quadrature(f, am, bm, n);
}

// 1/log t is convex for t > 1.
inline Enclosure li_quadrature(const XReal& x, long n) {
  pnt::PrecisionScope ps(160);
  auto f = [](const Enclosure& t) { return Enclosure(1L) / log(t); };
  return convex_quadrature(f, Enclosure(2L), Enclosure(x), n);
}

inline Enclosure li_eint(const XReal& x) {
  pnt::PrecisionScope ps(1024);
  Enclosure lx = log(Enclosure(x));
  Enclosure l2 = log(Enclosure(2L));
  return Enclosure(eint(lx.lo()).lo(), eint(lx.hi()).hi()) - Enclosure(eint(l2.hi()).lo(), eint(l2.lo()).hi());
}

inline Enclosure li_offset_eint() {
  pnt::PrecisionScope ps(1024);
  Enclosure l2 = log(Enclosure(2L));
  return Enclosure(eint(l2.lo()).lo(), eint(l2.hi()).hi());
}

inline bool is_prime_trial(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

// Plain byte sieve, independent of the bitset store.
inline std::vector<std::uint8_t> byte_sieve(std::uint64_t n) {
  std::vector<std::uint8_t> s(n + 1, 1);
  s[0] = 0;
  if (n >= 1) s[1] = 0;
  for (std::uint64_t i = 2; i * i <= n; ++i)
    if (s[i])
      for (std::uint64_t j = i * i; j <= n; j += i) s[j] = 0;
  return s;
}

}  // namespace oracle

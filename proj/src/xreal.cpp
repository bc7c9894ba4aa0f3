#include "pnt/xreal.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cstring>

namespace pnt {

namespace {

std::atomic<mpfr_prec_t> g_default_prec{kDefaultPrecision};
thread_local mpfr_prec_t tl_prec = 0;

// MPFR keeps the exponent range per thread.
void ensure_range() {
  thread_local bool done = false;
  if (!done) {
    mpfr_set_emax(mpfr_get_emax_max());
    mpfr_set_emin(mpfr_get_emin_min());
    done = true;
  }
}

mpfr_rnd_t rnd(Dir d) { return d == Dir::up ? MPFR_RNDU : MPFR_RNDD; }

mpfr_prec_t resolve(mpfr_prec_t p) { return p > 0 ? p : working_precision(); }

void check_result(const XReal& r, const char* what) {
  if (mpfr_nan_p(r.get())) throw DomainError(std::string("undefined result in ") + what);
  if (mpfr_inf_p(r.get()) && mpfr_overflow_p()) {
    mpfr_clear_overflow();
    throw PrecisionExhausted(std::string("exponent range exceeded in ") + what);
  }
  if (mpfr_underflow_p()) {
    mpfr_clear_underflow();
    throw PrecisionExhausted(std::string("exponent range exceeded in ") + what);
  }
}

}  // namespace

mpfr_prec_t working_precision() { return tl_prec > 0 ? tl_prec : g_default_prec.load(); }

void set_default_precision(mpfr_prec_t bits) {
  if (bits < MPFR_PREC_MIN || bits > kMaxPrecision) throw DomainError("precision out of range");
  g_default_prec.store(bits);
}

PrecisionScope::PrecisionScope(mpfr_prec_t bits) : saved_(tl_prec) {
  if (bits < MPFR_PREC_MIN || bits > kMaxPrecision) throw DomainError("precision out of range");
  tl_prec = bits;
}

PrecisionScope::~PrecisionScope() { tl_prec = saved_; }

XReal::XReal() : XReal(Prec{working_precision()}) {}

XReal::XReal(Prec prec) {
  ensure_range();
  mpfr_init2(v_, prec.bits);
  mpfr_set_zero(v_, 1);
}

XReal::XReal(long v) {
  ensure_range();
  mpfr_init2(v_, std::max<mpfr_prec_t>(64, working_precision()));
  mpfr_set_si(v_, v, MPFR_RNDN);
}

XReal::XReal(const XReal& o) : tag_(o.tag_) {
  mpfr_init2(v_, o.precision());
  mpfr_set(v_, o.v_, MPFR_RNDN);
}

XReal::XReal(XReal&& o) noexcept : tag_(o.tag_) {
  mpfr_init2(v_, MPFR_PREC_MIN);
  mpfr_swap(v_, o.v_);
}

XReal& XReal::operator=(const XReal& o) {
  if (this != &o) {
    mpfr_set_prec(v_, o.precision());
    mpfr_set(v_, o.v_, MPFR_RNDN);
    tag_ = o.tag_;
  }
  return *this;
}

XReal& XReal::operator=(XReal&& o) noexcept {
  mpfr_swap(v_, o.v_);
  tag_ = o.tag_;
  return *this;
}

XReal::~XReal() { mpfr_clear(v_); }

XReal XReal::from_double(double v) {
  XReal r(Prec{std::max<mpfr_prec_t>(53, working_precision())});
  mpfr_set_d(r.v_, v, MPFR_RNDN);
  return r;
}

XReal XReal::parse(std::string_view text, Dir d, mpfr_prec_t prec) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' ' || c == '_'; }), s.end());
  if (s.empty()) throw DomainError("empty number");
  XReal r(Prec{resolve(prec)});
  if (s == "inf" || s == "+inf" || s == "infinity") {
    mpfr_set_inf(r.v_, 1);
    return r;
  }
  char* end = nullptr;
  int t = mpfr_strtofr(r.v_, s.c_str(), &end, 10, rnd(d));
  if (end == s.c_str() || *end != '\0' || mpfr_nan_p(r.v_)) throw DomainError("not a number: " + s);
  r.set_ternary(t);
  return r;
}

XReal XReal::infinity() {
  XReal r(Prec{MPFR_PREC_MIN});
  mpfr_set_inf(r.v_, 1);
  return r;
}

double XReal::to_double(Dir d) const { return mpfr_get_d(v_, rnd(d)); }

long XReal::to_long_floor() const { return mpfr_get_si(v_, MPFR_RNDD); }

std::string XReal::str(int digits, Dir d) const {
  if (mpfr_zero_p(v_)) return "0";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  mpfr_exp_t e = 0;
  char* raw = mpfr_get_str(nullptr, &e, 10, static_cast<size_t>(std::max(digits, 1)), v_, rnd(d));
  std::string m(raw);
  mpfr_free_str(raw);
  std::string sign;
  if (m[0] == '-') {
    sign = "-";
    m.erase(0, 1);
  }
  // value = 0.m * 10^e
  if (e >= -2 && e <= 6) {
    if (e <= 0) return sign + "0." + std::string(static_cast<size_t>(-e), '0') + m;
    if (static_cast<size_t>(e) >= m.size()) return sign + m + std::string(static_cast<size_t>(e) - m.size(), '0');
    return sign + m.substr(0, static_cast<size_t>(e)) + "." + m.substr(static_cast<size_t>(e));
  }
  std::string out = sign + m.substr(0, 1);
  if (m.size() > 1) out += "." + m.substr(1);
  return out + "e" + std::to_string(static_cast<long>(e) - 1);
}

XReal xr_arith(Op op, const XReal& a, const XReal& b, Dir d, mpfr_prec_t prec) {
  XReal r(Prec{resolve(prec)});
  mpfr_rnd_t m = rnd(d);
  int t = 0;
  mpfr_clear_flags();
  switch (op) {
    case Op::add: t = mpfr_add(r.raw(), a.get(), b.get(), m); break;
    case Op::sub: t = mpfr_sub(r.raw(), a.get(), b.get(), m); break;
    case Op::mul: t = mpfr_mul(r.raw(), a.get(), b.get(), m); break;
    case Op::div:
      if (b.is_zero()) throw DomainError("division by zero");
      t = mpfr_div(r.raw(), a.get(), b.get(), m);
      break;
    case Op::pow:
      if (a.sign() < 0) throw DomainError("pow of negative base");
      t = mpfr_pow(r.raw(), a.get(), b.get(), m);
      break;
    default: return xr_arith(op, a, d, prec);
  }
  r.set_ternary(t);
  check_result(r, "xr_arith");
  return r;
}

XReal xr_arith(Op op, const XReal& a, Dir d, mpfr_prec_t prec) {
  XReal r(Prec{resolve(prec)});
  mpfr_rnd_t m = rnd(d);
  int t = 0;
  mpfr_clear_flags();
  switch (op) {
    case Op::exp: t = mpfr_exp(r.raw(), a.get(), m); break;
    case Op::log:
      if (a.sign() <= 0) throw DomainError("log of non-positive value");
      t = mpfr_log(r.raw(), a.get(), m);
      break;
    case Op::sqrt:
      if (a.sign() < 0) throw DomainError("sqrt of negative value");
      t = mpfr_sqrt(r.raw(), a.get(), m);
      break;
    default: throw DomainError("binary operation needs two arguments");
  }
  r.set_ternary(t);
  check_result(r, "xr_arith");
  return r;
}

XReal min(const XReal& a, const XReal& b) { return b < a ? b : a; }
XReal max(const XReal& a, const XReal& b) { return a < b ? b : a; }

Decimal round_decimal(const XReal& x, int sig, Dir d) {
  if (x.is_zero()) return {"0", XReal(0L)};
  mpfr_exp_t e = 0;
  char* raw = mpfr_get_str(nullptr, &e, 10, static_cast<size_t>(sig), x.get(), rnd(d));
  std::string m(raw);
  mpfr_free_str(raw);
  std::string sign;
  if (m[0] == '-') {
    sign = "-";
    m.erase(0, 1);
  }
  std::string text = sign + m.substr(0, 1);
  if (m.size() > 1) text += "." + m.substr(1);
  text += "e" + std::to_string(static_cast<long>(e) - 1);
  return {text, XReal::parse(text, d, std::max(x.precision(), working_precision()))};
}

XReal decimal_ulp(const XReal& x, int sig) {
  mpfr_exp_t e = 0;
  char* raw = mpfr_get_str(nullptr, &e, 10, static_cast<size_t>(sig), x.get(), MPFR_RNDN);
  mpfr_free_str(raw);
  return XReal::parse("1e" + std::to_string(static_cast<long>(e) - sig), Dir::up);
}

// ---------------------------------------------------------------------------

Enclosure::Enclosure() : lo_(0L), hi_(0L) {}
Enclosure::Enclosure(long v) : lo_(v), hi_(v) {}
Enclosure::Enclosure(const XReal& point) : lo_(point), hi_(point) {}

Enclosure::Enclosure(XReal lo, XReal hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (hi_ < lo_) throw DomainError("enclosure with lo > hi");
}

Enclosure Enclosure::parse(std::string_view text) {
  return Enclosure(XReal::parse(text, Dir::down), XReal::parse(text, Dir::up));
}

Enclosure Enclosure::parse_truncated(std::string_view text) {
  std::string s(text);
  size_t epos = s.find_first_of("eE");
  std::string mant = s.substr(0, epos);
  long ex = epos == std::string::npos ? 0 : std::strtol(s.c_str() + epos + 1, nullptr, 10);
  size_t dot = mant.find('.');
  long frac = dot == std::string::npos ? 0 : static_cast<long>(mant.size() - dot - 1);
  XReal unit = XReal::parse("1e" + std::to_string(ex - frac), Dir::up);
  XReal lo = XReal::parse(s, Dir::down);
  XReal hi = xr_arith(Op::add, XReal::parse(s, Dir::up), unit, Dir::up);
  if (lo.sign() < 0) throw DomainError("truncated enclosure expects a nonnegative value");
  return Enclosure(lo, hi);
}

Enclosure Enclosure::ratio(long num, long den) {
  if (den == 0) throw DomainError("zero denominator");
  return Enclosure(num) / Enclosure(den);
}

Enclosure Enclosure::pi() {
  XReal lo, hi;
  mpfr_const_pi(lo.raw(), MPFR_RNDD);
  mpfr_const_pi(hi.raw(), MPFR_RNDU);
  return Enclosure(lo, hi);
}

Enclosure Enclosure::ln2() {
  XReal lo, hi;
  mpfr_const_log2(lo.raw(), MPFR_RNDD);
  mpfr_const_log2(hi.raw(), MPFR_RNDU);
  return Enclosure(lo, hi);
}

Enclosure Enclosure::euler_gamma() {
  XReal lo, hi;
  mpfr_const_euler(lo.raw(), MPFR_RNDD);
  mpfr_const_euler(hi.raw(), MPFR_RNDU);
  return Enclosure(lo, hi);
}

XReal Enclosure::mid() const {
  XReal s = xr_arith(Op::add, lo_, hi_, Dir::down, std::max(lo_.precision(), hi_.precision()) + 1);
  mpfr_div_2ui(s.raw(), s.get(), 1, MPFR_RNDN);
  return s;
}

XReal Enclosure::width() const { return xr_arith(Op::sub, hi_, lo_, Dir::up); }

XReal Enclosure::rel_width() const {
  if (contains_zero()) return is_point() ? XReal(0L) : XReal::infinity();
  XReal mag = lo_.sign() > 0 ? lo_ : xr_arith(Op::sub, XReal(0L), hi_, Dir::down);
  return xr_arith(Op::div, width(), mag, Dir::up);
}

double Enclosure::approx() const { return mid().to_double(); }

std::string Enclosure::str(int digits) const {
  return "[" + lo_.str(digits, Dir::down) + ", " + hi_.str(digits, Dir::up) + "]";
}

bool certainly_lt(const Enclosure& a, const Enclosure& b) { return a.hi() < b.lo(); }
bool certainly_le(const Enclosure& a, const Enclosure& b) { return a.hi() <= b.lo(); }

Enclosure operator+(const Enclosure& a, const Enclosure& b) {
  return Enclosure(xr_arith(Op::add, a.lo(), b.lo(), Dir::down), xr_arith(Op::add, a.hi(), b.hi(), Dir::up));
}

Enclosure operator-(const Enclosure& a, const Enclosure& b) {
  return Enclosure(xr_arith(Op::sub, a.lo(), b.hi(), Dir::down), xr_arith(Op::sub, a.hi(), b.lo(), Dir::up));
}

Enclosure operator-(const Enclosure& a) {
  XReal lo = a.hi(), hi = a.lo();
  mpfr_neg(lo.raw(), lo.get(), MPFR_RNDN);
  mpfr_neg(hi.raw(), hi.get(), MPFR_RNDN);
  return Enclosure(lo, hi);
}

Enclosure operator*(const Enclosure& a, const Enclosure& b) {
  if (a.lo().sign() >= 0 && b.lo().sign() >= 0)
    return Enclosure(xr_arith(Op::mul, a.lo(), b.lo(), Dir::down), xr_arith(Op::mul, a.hi(), b.hi(), Dir::up));
  const XReal* xs[2] = {&a.lo(), &a.hi()};
  const XReal* ys[2] = {&b.lo(), &b.hi()};
  XReal lo = xr_arith(Op::mul, *xs[0], *ys[0], Dir::down);
  XReal hi = xr_arith(Op::mul, *xs[0], *ys[0], Dir::up);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      if (i == 0 && j == 0) continue;
      lo = min(lo, xr_arith(Op::mul, *xs[i], *ys[j], Dir::down));
      hi = max(hi, xr_arith(Op::mul, *xs[i], *ys[j], Dir::up));
    }
  return Enclosure(lo, hi);
}

Enclosure operator/(const Enclosure& a, const Enclosure& b) {
  if (b.contains_zero()) throw DomainError("division by an enclosure containing 0");
  if (a.lo().sign() >= 0 && b.lo().sign() > 0)
    return Enclosure(xr_arith(Op::div, a.lo(), b.hi(), Dir::down), xr_arith(Op::div, a.hi(), b.lo(), Dir::up));
  Enclosure inv(xr_arith(Op::div, XReal(1L), b.hi(), Dir::down), xr_arith(Op::div, XReal(1L), b.lo(), Dir::up));
  return a * inv;
}

Enclosure exp(const Enclosure& x) {
  return Enclosure(xr_arith(Op::exp, x.lo(), Dir::down), xr_arith(Op::exp, x.hi(), Dir::up));
}

Enclosure log(const Enclosure& x) {
  if (x.lo().sign() <= 0) throw DomainError("log of an enclosure reaching non-positive values");
  return Enclosure(xr_arith(Op::log, x.lo(), Dir::down), xr_arith(Op::log, x.hi(), Dir::up));
}

Enclosure sqrt(const Enclosure& x) {
  if (x.hi().sign() < 0) throw DomainError("sqrt of negative value");
  XReal lo = x.lo().sign() < 0 ? XReal(0L) : xr_arith(Op::sqrt, x.lo(), Dir::down);
  return Enclosure(lo, xr_arith(Op::sqrt, x.hi(), Dir::up));
}

Enclosure sqr(const Enclosure& x) {
  Enclosure a = abs(x);
  return Enclosure(xr_arith(Op::mul, a.lo(), a.lo(), Dir::down), xr_arith(Op::mul, a.hi(), a.hi(), Dir::up));
}

Enclosure abs(const Enclosure& x) {
  if (x.lo().sign() >= 0) return x;
  if (x.hi().sign() <= 0) return -x;
  XReal nlo = x.lo();
  mpfr_neg(nlo.raw(), nlo.get(), MPFR_RNDN);
  return Enclosure(XReal(0L), max(nlo, x.hi()));
}

Enclosure pow(const Enclosure& x, const Enclosure& y) {
  if (!x.positive()) throw DomainError("pow needs a positive base");
  return exp(y * log(x));
}

Enclosure pow(const Enclosure& x, long n) {
  if (n == 0) return Enclosure(1L);
  if (n < 0) return Enclosure(1L) / pow(x, -n);
  Enclosure r(1L), b = x;
  while (n > 0) {
    if (n & 1) r = r * b;
    n >>= 1;
    if (n > 0) b = (b.lo().sign() >= 0) ? b * b : sqr(b);
  }
  return r;
}

Enclosure hull(const Enclosure& a, const Enclosure& b) { return Enclosure(min(a.lo(), b.lo()), max(a.hi(), b.hi())); }
Enclosure max(const Enclosure& a, const Enclosure& b) { return Enclosure(max(a.lo(), b.lo()), max(a.hi(), b.hi())); }
Enclosure min(const Enclosure& a, const Enclosure& b) { return Enclosure(min(a.lo(), b.lo()), min(a.hi(), b.hi())); }

LogReal LogReal::from_log(Enclosure log_value) {
  LogReal r;
  r.log_ = std::move(log_value);
  return r;
}

LogReal LogReal::from_value(const Enclosure& value) { return from_log(pnt::log(value)); }

}  // namespace pnt

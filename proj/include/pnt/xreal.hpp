#pragma once

#include <mpfr.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace pnt {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class PrecisionExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Dir { down, up };
enum class Tag { exact, down, up };

inline constexpr mpfr_prec_t kDefaultPrecision = 192;
inline constexpr mpfr_prec_t kMaxPrecision = 4096;

// Precision used by Enclosure arithmetic and the special functions on the
// calling thread.
mpfr_prec_t working_precision();
void set_default_precision(mpfr_prec_t bits);

class PrecisionScope {
 public:
  explicit PrecisionScope(mpfr_prec_t bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  mpfr_prec_t saved_;
};

struct Prec {
  mpfr_prec_t bits;
};

class XReal {
 public:
  XReal();
  explicit XReal(Prec prec);
  XReal(long v);  // NOLINT: exact
  XReal(const XReal& o);
  XReal(XReal&& o) noexcept;
  XReal& operator=(const XReal& o);
  XReal& operator=(XReal&& o) noexcept;
  ~XReal();

  static XReal from_double(double v);
  // Decimal (or "inf") to binary, rounded in direction d.
  static XReal parse(std::string_view text, Dir d, mpfr_prec_t prec = 0);
  static XReal infinity();

  mpfr_srcptr get() const { return v_; }
  mpfr_ptr raw() { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

  Tag tag() const { return tag_; }
  void set_tag(Tag t) { tag_ = t; }
  void set_ternary(int t) { tag_ = t == 0 ? Tag::exact : (t > 0 ? Tag::up : Tag::down); }

  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_inf() const { return mpfr_inf_p(v_) != 0; }
  double to_double(Dir d = Dir::down) const;
  long to_long_floor() const;

  // Scientific text with `digits` significant digits, rounded in direction d.
  std::string str(int digits = 6, Dir d = Dir::up) const;

  friend int cmp(const XReal& a, const XReal& b) { return mpfr_cmp(a.v_, b.v_); }
  friend bool operator<(const XReal& a, const XReal& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const XReal& a, const XReal& b) { return cmp(a, b) <= 0; }
  friend bool operator>(const XReal& a, const XReal& b) { return cmp(a, b) > 0; }
  friend bool operator>=(const XReal& a, const XReal& b) { return cmp(a, b) >= 0; }
  friend bool operator==(const XReal& a, const XReal& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend bool operator!=(const XReal& a, const XReal& b) { return !(a == b); }

 private:
  mpfr_t v_;
  Tag tag_ = Tag::exact;
};

enum class Op { add, sub, mul, div, pow, exp, log, sqrt };

// Single directed-rounded operation. Unary ops ignore b.
XReal xr_arith(Op op, const XReal& a, const XReal& b, Dir d, mpfr_prec_t prec = 0);
XReal xr_arith(Op op, const XReal& a, Dir d, mpfr_prec_t prec = 0);

XReal min(const XReal& a, const XReal& b);
XReal max(const XReal& a, const XReal& b);

// Round to `sig` significant decimal digits in direction d. Returns the
// decimal text and its binary value (rounded the same way).
struct Decimal {
  std::string text;
  XReal value;
};
Decimal round_decimal(const XReal& x, int sig, Dir d);

// Unit of the last place of a decimal with `sig` significant digits near x.
XReal decimal_ulp(const XReal& x, int sig);

class Enclosure {
 public:
  Enclosure();
  Enclosure(long v);  // NOLINT: exact point
  explicit Enclosure(const XReal& point);
  Enclosure(XReal lo, XReal hi);

  static Enclosure parse(std::string_view text);
  // Truncated decimal: the true value lies in [text, text + one unit of the
  // last printed digit].
  static Enclosure parse_truncated(std::string_view text);
  static Enclosure ratio(long num, long den);
  static Enclosure pi();
  static Enclosure ln2();
  static Enclosure euler_gamma();

  const XReal& lo() const { return lo_; }
  const XReal& hi() const { return hi_; }
  XReal bound(Dir d) const { return d == Dir::up ? hi_ : lo_; }
  XReal mid() const;
  XReal width() const;
  XReal rel_width() const;
  double approx() const;

  bool contains(const XReal& x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Enclosure& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool overlaps(const Enclosure& o) const { return lo_ <= o.hi_ && o.lo_ <= hi_; }
  bool is_point() const { return lo_ == hi_; }
  bool positive() const { return lo_.sign() > 0; }
  bool negative() const { return hi_.sign() < 0; }
  bool contains_zero() const { return lo_.sign() <= 0 && hi_.sign() >= 0; }

  std::string str(int digits = 12) const;

 private:
  XReal lo_, hi_;
};

// Interval ordering: true only when it holds for every pair of members.
bool certainly_lt(const Enclosure& a, const Enclosure& b);
bool certainly_le(const Enclosure& a, const Enclosure& b);

Enclosure operator+(const Enclosure& a, const Enclosure& b);
Enclosure operator-(const Enclosure& a, const Enclosure& b);
Enclosure operator*(const Enclosure& a, const Enclosure& b);
Enclosure operator/(const Enclosure& a, const Enclosure& b);
Enclosure operator-(const Enclosure& a);
inline Enclosure& operator+=(Enclosure& a, const Enclosure& b) { return a = a + b; }
inline Enclosure& operator-=(Enclosure& a, const Enclosure& b) { return a = a - b; }
inline Enclosure& operator*=(Enclosure& a, const Enclosure& b) { return a = a * b; }
inline Enclosure& operator/=(Enclosure& a, const Enclosure& b) { return a = a / b; }

Enclosure exp(const Enclosure& x);
Enclosure log(const Enclosure& x);
Enclosure sqrt(const Enclosure& x);
Enclosure sqr(const Enclosure& x);
Enclosure abs(const Enclosure& x);
Enclosure pow(const Enclosure& x, const Enclosure& y);  // x > 0
Enclosure pow(const Enclosure& x, long n);
Enclosure hull(const Enclosure& a, const Enclosure& b);
Enclosure max(const Enclosure& a, const Enclosure& b);
Enclosure min(const Enclosure& a, const Enclosure& b);

// A positive magnitude held through its natural logarithm, so values such as
// e^(10^7) never need to be formed.
class LogReal {
 public:
  LogReal() = default;
  static LogReal from_log(Enclosure log_value);
  static LogReal from_value(const Enclosure& value);
  const Enclosure& log() const { return log_; }
  Enclosure value() const { return exp(log_); }

  friend LogReal operator*(const LogReal& a, const LogReal& b) { return from_log(a.log_ + b.log_); }
  friend LogReal operator/(const LogReal& a, const LogReal& b) { return from_log(a.log_ - b.log_); }

 private:
  Enclosure log_;
};

// Run fn under increasing precision, doubling on PrecisionExhausted.
template <class F>
auto with_precision_retry(F&& fn) {
  mpfr_prec_t p = working_precision();
  for (;;) {
    try {
      PrecisionScope scope(p);
      return fn();
    } catch (const PrecisionExhausted&) {
      if (p * 2 > kMaxPrecision) throw;
      p *= 2;
    }
  }
}

}  // namespace pnt

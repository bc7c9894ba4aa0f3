#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pnt/xreal.hpp"

namespace pnt {

class BelowTable : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class OrderError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyTable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Kind { psi, theta, pi };

std::string to_string(Kind k);
Kind parse_kind(const std::string& s);

// Exact rational exponent, e.g. 3/2 or 1.503 = 1503/1000.
struct Rational {
  long num = 0;
  long den = 1;

  static Rational parse(const std::string& s);
  Enclosure value() const { return Enclosure::ratio(num, den); }
  std::string str() const;
  friend bool operator==(const Rational& a, const Rational& b) { return a.num * b.den == b.num * a.den; }
};

// Default zero-free region constant.
inline constexpr const char* kDefaultR = "5.5666305";

// E_kind(x) <= A (log x / R)^B exp(-C sqrt(log x / R)) for x >= x0.
struct AsymptoticBound {
  Kind kind = Kind::theta;
  XReal A;           // up-rounded
  Rational B;
  XReal C;
  XReal R;
  Enclosure log_x0;  // validity threshold

  static AsymptoticBound make(Kind kind, const std::string& A, const std::string& B, const std::string& C,
                              const std::string& R, const Enclosure& log_x0);
  void validate() const;
};

Enclosure eval_asymp_enclosure(const AsymptoticBound& bound, const Enclosure& log_x);
// Directed value. Below the validity threshold the value is still returned and
// *below_threshold (when given) is set.
XReal eval_asymp(const AsymptoticBound& bound, const Enclosure& log_x, Dir d, bool* below_threshold = nullptr);

// log x beyond which the bound curve decreases: 4 B^2 R / C^2.
Enclosure asymp_decreasing_log_threshold(const AsymptoticBound& bound);

struct PlainForm {
  XReal A;  // A / R^B, up
  Rational B;
  XReal C;  // C / sqrt(R), down
};

PlainForm to_plain_form(const AsymptoticBound& bound);
XReal eval_plain(const PlainForm& f, const Enclosure& log_x, Dir d);

// Where g(a,b,c,x) = x^{-a} (log x)^b exp(c sqrt(log x)) decreases.
struct DecreasingRegion {
  enum class Shape { always, beyond, below, never };
  Shape shape = Shape::always;
  Enclosure sqrt_log_threshold;  // meaningful for beyond/below

  Enclosure log_threshold() const { return sqr(sqrt_log_threshold); }
  // True when g is certainly decreasing on a neighbourhood of sqrt(log x) = u.
  bool certainly_decreasing_at(const Enclosure& u) const;
};

DecreasingRegion decreasing_from(const Enclosure& a, const Enclosure& b, const Enclosure& c);
Enclosure g_value(const Enclosure& a, const Enclosure& b, const Enclosure& c, const Enclosure& log_x);

struct StepRow {
  XReal log_x;  // rounded up
  XReal eps;    // rounded up
  std::string log_x_text;
  std::string eps_text;
  std::string provenance;
};

// Rows (log x, eps): E_kind(x) <= eps for every x >= e^{log x}.
class StepBoundTable {
 public:
  StepBoundTable() = default;
  StepBoundTable(Kind kind, std::vector<StepRow> rows, std::string provenance = {}, std::string R = kDefaultR);

  static StepRow make_row(const std::string& log_x, const std::string& eps, std::string provenance = {});

  Kind kind() const { return kind_; }
  const std::vector<StepRow>& rows() const { return rows_; }
  const std::string& provenance() const { return provenance_; }
  const std::string& R() const { return R_; }
  size_t size() const { return rows_.size(); }

  // Index of the last row with row.log_x <= log_x.
  size_t index_at(const XReal& log_x) const;
  std::vector<size_t> non_monotone_rows() const;

 private:
  Kind kind_ = Kind::theta;
  std::vector<StepRow> rows_;
  std::string provenance_;
  std::string R_ = kDefaultR;
};

XReal eval_step(const StepBoundTable& table, const XReal& log_x);
XReal eval_step(const StepBoundTable& table, const Enclosure& log_x);

// Point where pi, theta and Li are known.
struct ExactAnchor {
  std::string name;
  Enclosure x0;
  std::int64_t pi_x0 = 0;
  Enclosure theta_x0;
  Enclosure li_x0;
  std::string provenance;
  bool oracle_verifiable = false;

  Enclosure log_x0() const { return log(x0); }
};

// Strictly increasing log-scale breakpoints.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<Enclosure> points);

  const std::vector<Enclosure>& points() const { return points_; }
  const Enclosure& front() const { return points_.front(); }
  const Enclosure& back() const { return points_.back(); }
  size_t size() const { return points_.size(); }

  // Breakpoints of `base` between lo and hi, with lo and hi added and every
  // gap split into `pieces` equal parts.
  static Partition refine_between(const std::vector<XReal>& base, const Enclosure& lo, const Enclosure& hi,
                                  int pieces);

 private:
  std::vector<Enclosure> points_;
};

}  // namespace pnt

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pnt/bounds.hpp"

namespace pnt {

class HypothesisViolated : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class PartitionNotCovered : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class BranchMisuse : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// (pi(x0) - Li(x0)) / (x0 / log x0) - (theta(x0) - x0) / x0
Enclosure signed_discrepancy(const ExactAnchor& anchor);

struct AnchorDiscrepancy {
  Enclosure log_x0;
  Enclosure value;  // >= 0
  std::string source;

  static AnchorDiscrepancy from_anchor(const ExactAnchor& anchor);
  // |E_pi - E_theta| at x0 is at most eps_theta + eps_pi.
  static AnchorDiscrepancy from_bounds(const Enclosure& log_x0, const XReal& eps_theta, const XReal& eps_pi);
};

struct Bkwln_a1a2 {
  XReal a1;
  XReal a2;
  Enclosure valid_from_log_x0;
  std::string provenance;

  static Bkwln_a1a2 defaults();
};

Enclosure nu_asymp(const AsymptoticBound& psi, const Bkwln_a1a2& a, const Enclosure& log_x0);
AsymptoticBound psi_to_theta_asymp(const AsymptoticBound& psi, const Bkwln_a1a2& a);

Enclosure mu_asymp(const AsymptoticBound& theta, const AnchorDiscrepancy& disc, const Enclosure& log_x1);
AsymptoticBound theta_to_pi_asymp(const AsymptoticBound& theta, const AnchorDiscrepancy& disc, const Enclosure& log_x1);
AsymptoticBound psi_to_pi_asymp(const AsymptoticBound& psi, const Bkwln_a1a2& a, const AnchorDiscrepancy& disc,
                                const Enclosure& log_x1);

struct ThetaFromPsi {
  XReal eps_theta;        // two-sided bound for E_theta(x), x >= x0
  XReal one_sided_upper;  // (theta(x) - x)/x <= eps_psi
};

ThetaFromPsi psi_to_theta_num(const XReal& eps_psi, const Enclosure& log_x0);

// Numerical theta bound: step table, optionally sharpened by an asymptotic
// theta bound wherever that curve is already decreasing.
class ThetaNumSource {
 public:
  explicit ThetaNumSource(StepBoundTable table, std::optional<AsymptoticBound> envelope = std::nullopt);

  // eps with E_theta(x) <= eps for every x >= e^{log_x}.
  XReal at(const Enclosure& log_x) const;
  const StepBoundTable& table() const { return table_; }
  const std::optional<AsymptoticBound>& envelope() const { return envelope_; }

 private:
  StepBoundTable table_;
  std::optional<AsymptoticBound> envelope_;
  Enclosure envelope_from_;
};

// log_x2 = nullopt stands for x2 = infinity.
Enclosure mu_num(const AnchorDiscrepancy& disc, const ThetaNumSource& theta, const Partition& part,
                 const Enclosure& log_x1, const std::optional<Enclosure>& log_x2);
Enclosure mu_num(const AnchorDiscrepancy& disc, const StepBoundTable& table, const Partition& part,
                 const Enclosure& log_x1, const std::optional<Enclosure>& log_x2);

XReal pi_num_on_interval(const ThetaNumSource& theta, const Partition& part, const AnchorDiscrepancy& disc,
                         const Enclosure& log_x1, const std::optional<Enclosure>& log_x2);
XReal pi_num_on_interval(const StepBoundTable& table, const Partition& part, const AnchorDiscrepancy& disc,
                         const Enclosure& log_x1, const std::optional<Enclosure>& log_x2);

struct StitchedPiece {
  Enclosure log_lo;
  std::optional<Enclosure> log_hi;  // nullopt: infinity
  XReal eps_theta;
  Enclosure mu;
  XReal eps_pi;
};

// One pass over sorted partition points starting at log x0. Every point with
// is_sub set opens a subinterval that ends at the next such point (or at
// infinity for the last one); the returned pieces follow that order.
std::vector<StitchedPiece> stitch_sweep(const ThetaNumSource& theta, const AnchorDiscrepancy& disc,
                                        const std::vector<Enclosure>& points, const std::vector<bool>& is_sub);

struct StitchedResult {
  XReal eps;
  std::vector<StitchedPiece> pieces;
};

// subdivisions: b'_1 = log x1 < ... < b'_{M-1}; the last piece runs to infinity.
// The sum partition uses log x0, the table rows below b'_1 and the subdivision
// points, each gap split into `refinement` pieces.
StitchedResult pi_num_stitched(const ThetaNumSource& theta, const AnchorDiscrepancy& disc,
                               const std::vector<Enclosure>& subdivisions, int refinement = 1);

enum class DominanceMode { row_start, certified };

struct DominanceReport {
  bool holds = true;
  std::optional<size_t> first_violation;  // row index
  std::vector<size_t> violations;
  Enclosure violation_log_x;
  XReal violation_step;
  XReal violation_curve;
  size_t rows_checked = 0;
};

DominanceReport dominates(const StepBoundTable& table, const AsymptoticBound& bound, const Enclosure& log_lo,
                          const Enclosure& log_hi, DominanceMode mode = DominanceMode::row_start);

}  // namespace pnt

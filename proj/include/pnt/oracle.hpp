#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pnt/bounds.hpp"

namespace pnt {

class AboveLimit : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

struct ExactCounts {
  std::int64_t pi = 0;
  Enclosure theta;
  Enclosure psi;
};

// Primality bitset over odd numbers with cumulative (pi, theta, psi) every
// kStride integers. theta and psi are held in fixed point with 96 fractional
// bits, floor and ceiling accumulated separately.
class PrimeStore {
 public:
  static constexpr std::uint64_t kStride = std::uint64_t{1} << 16;
  static constexpr std::uint64_t kDefaultLimit = 100000000;

  explicit PrimeStore(std::uint64_t limit = kDefaultLimit, unsigned threads = 0);
  // Reuses the checkpoint cache at `cache_path` when it matches `limit`,
  // otherwise builds and writes it.
  static PrimeStore with_cache(std::uint64_t limit, const std::string& cache_path, unsigned threads = 0);

  std::uint64_t limit() const { return limit_; }
  bool is_prime(std::uint64_t n) const;

  ExactCounts exact_counts(std::uint64_t x) const;
  ExactCounts exact_counts(const XReal& x) const;

  // Calls f(p) for every prime lo <= p <= hi (hi clipped to the limit).
  void for_each_prime(std::uint64_t lo, std::uint64_t hi, const std::function<void(std::uint64_t)>& f) const;
  // Prime powers p^k <= limit with k >= 2, sorted, as (p^k, p).
  const std::vector<std::pair<std::uint64_t, std::uint64_t>>& prime_powers() const { return powers_; }

  bool save(const std::string& path) const;

 private:
  struct Checkpoint {
    std::uint64_t pi = 0;
    __int128 theta_lo = 0, theta_hi = 0, psi_lo = 0, psi_hi = 0;
  };

  struct Unbuilt {};
  explicit PrimeStore(Unbuilt) {}
  void sieve(unsigned threads);
  void build_checkpoints(unsigned threads);
  bool load(const std::string& path);
  bool bit(std::uint64_t n) const { return (bits_[n >> 7] >> ((n >> 1) & 63)) & 1; }

  std::uint64_t limit_ = 0;
  std::vector<std::uint64_t> bits_;  // bit for odd n set when n is prime
  std::vector<std::pair<std::uint64_t, std::uint64_t>> powers_;
  std::vector<Checkpoint> checkpoints_;  // [b] covers n < b * kStride
};

// Enclosure of log(prod of factors) computed from directed products.
Enclosure log_of_product(const std::vector<std::uint64_t>& factors);

// theta(37), the constant value of theta on [37, 41).
Enclosure theta_37();

// Root of (pi(x) - Li(x)) / (x / log x) = (theta(x) - x) / x on (37, 41).
Enclosure crossing_point();
ExactAnchor crossing_anchor();

struct PointwiseViolation {
  std::uint64_t left = 0;   // the gap [left, right)
  std::uint64_t right = 0;
  double error = 0;  // upper estimate of sup E over the gap
  double bound = 0;  // lower estimate of the bound
};

struct PointwiseReport {
  std::uint64_t gaps_checked = 0;
  std::vector<PointwiseViolation> violations;  // capped at 100
  std::uint64_t violation_count = 0;
  double max_ratio = 0;  // max over gaps of error / bound
  bool verified() const { return violation_count == 0; }
};

// The bound as a function of log x. When `constant` is set, fn is not called.
struct PointwiseBound {
  std::function<XReal(const Enclosure&)> fn;
  std::optional<XReal> constant;

  static PointwiseBound of_constant(const XReal& c) { return {nullptr, c}; }
  static PointwiseBound of_asymp(const AsymptoticBound& b);
};

// Checks E_kind(x) <= bound(x) for x_min <= x <= x_max, one step of pi, theta or
// psi at a time. Over a step the error term is largest at one of the two ends,
// and the bound is taken as the smaller of its values there (so it must be
// monotone on each step; every bound shape used here is).
PointwiseReport verify_pointwise(const PrimeStore& store, Kind kind, const PointwiseBound& bound, std::uint64_t x_max,
                                 std::uint64_t x_min = 2);

// (1/sqrt x)(1.95 + 3.9/log x + 19.5/log^2 x), up-rounded.
XReal buthe_envelope(const Enclosure& log_x);
// True when the envelope strictly decreases along n log-spaced nodes of [lo, hi].
bool buthe_decreasing_on_grid(const Enclosure& log_lo, const Enclosure& log_hi, long nodes);

}  // namespace pnt

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "oracles.hpp"
#include "pnt/oracle.hpp"
#include "pnt/special.hpp"

using namespace pnt;

namespace {

const PrimeStore& big_store() {
  static const PrimeStore s(PrimeStore::kDefaultLimit);
  return s;
}

const PrimeStore& small_store() {
  static const PrimeStore s(1000000);
  return s;
}

// theta by direct summation over a byte sieve, one log per prime
Enclosure theta_rescan(const std::vector<std::uint8_t>& sieve, std::uint64_t x) {
  Enclosure t;
  for (std::uint64_t n = 2; n <= x; ++n)
    if (sieve[n]) t += log(Enclosure(static_cast<long>(n)));
  return t;
}

std::uint64_t iroot(std::uint64_t x, int k) {
  auto r = static_cast<std::uint64_t>(std::pow(static_cast<double>(x), 1.0 / k));
  auto pw = [&](std::uint64_t b) {
    unsigned __int128 v = 1;
    for (int i = 0; i < k; ++i) v *= b;
    return v;
  };
  while (r > 0 && pw(r) > x) --r;
  while (pw(r + 1) <= x) ++r;
  return r;
}

}  // namespace

TEST_CASE("primality matches trial division and a byte sieve") {
  const auto& s = small_store();
  auto ref = oracle::byte_sieve(1000000);
  for (std::uint64_t n = 0; n <= 1000000; ++n) REQUIRE(s.is_prime(n) == (ref[n] != 0));
  std::mt19937_64 rng(7);
  const auto& b = big_store();
  for (int i = 0; i < 2000; ++i) {
    std::uint64_t n = rng() % b.limit() + 1;
    CHECK(b.is_prime(n) == oracle::is_prime_trial(n));
  }
  CHECK_THROWS_AS((void)s.is_prime(1000001), AboveLimit);
}

TEST_CASE("exact counts at small points") {
  const auto& s = small_store();
  ExactCounts c = s.exact_counts(std::uint64_t{2});
  CHECK(c.pi == 1);
  CHECK(c.theta.overlaps(Enclosure::ln2()));
  CHECK(c.psi.overlaps(Enclosure::ln2()));

  c = s.exact_counts(XReal::parse("40.787732519", Dir::down));
  CHECK(c.pi == 12);
  Enclosure t;
  for (long p = 2; p <= 40; ++p)
    if (oracle::is_prime_trial(static_cast<std::uint64_t>(p))) t += log(Enclosure(p));
  CHECK(c.theta.overlaps(t));
  CHECK(c.theta.overlaps(theta_37()));
  CHECK_THROWS_AS(s.exact_counts(std::uint64_t{1000001}), AboveLimit);
}

TEST_CASE("pi(1e8) against an independent recount") {
  ExactCounts c = big_store().exact_counts(std::uint64_t{100000000});
  CHECK(c.pi == 5761455);
  auto ref = oracle::byte_sieve(100000000);
  std::int64_t n = 0;
  for (auto v : ref) n += v;
  CHECK(n == c.pi);
}

TEST_CASE("checkpointed theta agrees with a full rescan") {
  const auto& s = small_store();
  auto ref = oracle::byte_sieve(300000);
  for (std::uint64_t x : {65535ULL, 65536ULL, 65537ULL, 100003ULL, 131071ULL, 131072ULL, 300000ULL}) {
    ExactCounts c = s.exact_counts(x);
    Enclosure t = theta_rescan(ref, x);
    CHECK(c.theta.overlaps(t));
    // width at most 2^-64 theta(x)
    CHECK(c.theta.width() <= (Enclosure(c.theta.hi()) * Enclosure(XReal::parse("5.421e-20", Dir::down))).lo());
  }
}

TEST_CASE("psi - theta equals the sum of theta(x^(1/k)), theta <= psi") {
  const auto& s = big_store();
  std::vector<std::uint64_t> xs;
  for (const auto& pw : s.prime_powers()) {
    xs.push_back(pw.first);
    xs.push_back(pw.first - 1);
  }
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) xs.push_back(rng() % (s.limit() - 1) + 2);
  xs.push_back(s.limit());
  for (std::uint64_t x : xs) {
    if (x < 2) continue;
    ExactCounts c = s.exact_counts(x);
    Enclosure rhs;
    for (int k = 2; (std::uint64_t{1} << k) <= x; ++k) {
      std::uint64_t r = iroot(x, k);
      if (r >= 2) rhs += s.exact_counts(r).theta;
    }
    REQUIRE((c.psi - c.theta).overlaps(rhs));
    REQUIRE(c.theta.lo() <= c.psi.hi());
  }
}

TEST_CASE("checkpoint cache round trip") {
  std::string path = "pnt_sieve_test.cache";
  std::remove(path.c_str());
  PrimeStore a = PrimeStore::with_cache(300000, path);
  PrimeStore b = PrimeStore::with_cache(300000, path);
  for (std::uint64_t x : {2ULL, 1000ULL, 65536ULL, 299999ULL}) {
    ExactCounts ca = a.exact_counts(x), cb = b.exact_counts(x);
    CHECK(ca.pi == cb.pi);
    CHECK(ca.theta.lo() == cb.theta.lo());
    CHECK(ca.psi.hi() == cb.psi.hi());
  }
  // a cache built for another limit is ignored
  PrimeStore c = PrimeStore::with_cache(200000, path);
  CHECK(c.exact_counts(std::uint64_t{200000}).pi == 17984);
  std::remove(path.c_str());
}

TEST_CASE("crossing point") {
  Enclosure x = crossing_point();
  CHECK(x.contains(Enclosure::parse_truncated("40.787732519")) == false);  // far narrower than 1e-9
  CHECK(x.overlaps(Enclosure::parse_truncated("40.787732519")));
  CHECK(x.width() <= XReal::parse("1e-9", Dir::down));
  // sign change by direct evaluation
  auto disc = [](const char* v) {
    Enclosure xx = Enclosure::parse(v);
    Enclosure L = log(xx);
    return (Enclosure(12L) - li_moderate(xx)) * L / xx - (theta_37() - xx) / xx;
  };
  CHECK(disc("40.7").positive());
  CHECK(disc("40.9").negative());
  ExactAnchor a = crossing_anchor();
  CHECK(a.pi_x0 == 12);
  Enclosure mid(x.mid());
  Enclosure d = (Enclosure(12L) - li_moderate(mid)) * log(mid) / mid - (theta_37() - mid) / mid;
  CHECK(abs(d).hi() < XReal::parse("1e-12", Dir::down));
  // derivative (12 - Li(x)) / x stays negative on (37, 41)
  for (long k = 0; k <= 40; ++k) {
    Enclosure t = Enclosure(37L) + Enclosure::ratio(k, 10);
    CHECK((Enclosure(12L) - li_moderate(t)).negative());
  }
}

TEST_CASE("pointwise verification") {
  const auto& s = small_store();
  PointwiseReport r = verify_pointwise(s, Kind::pi, PointwiseBound::of_constant(XReal(1000000L)), 1000000);
  CHECK(r.verified());
  CHECK(r.gaps_checked == 78498);
  r = verify_pointwise(s, Kind::pi, PointwiseBound::of_constant(XReal(0L)), 1000);
  REQUIRE_FALSE(r.verified());
  CHECK(r.violations.front().left == 2);
  r = verify_pointwise(s, Kind::pi, PointwiseBound::of_constant(XReal::parse("0.4298", Dir::down)), 1000000);
  CHECK(r.verified());
  CHECK(r.max_ratio <= 1);
  for (Kind k : {Kind::theta, Kind::psi}) {
    r = verify_pointwise(s, k, PointwiseBound::of_constant(XReal(1L)), 1000000);
    CHECK(r.verified());
    r = verify_pointwise(s, k, PointwiseBound::of_constant(XReal::parse("0.001", Dir::down)), 1000);
    CHECK_FALSE(r.verified());
  }
  // an admissible asymptotic theta bound, valid from x >= 2, holds on every step
  auto theta_bound = AsymptoticBound::make(Kind::theta, "121.0961", "3/2", "2", kDefaultR, log(Enclosure(2L)));
  CHECK(verify_pointwise(s, Kind::theta, PointwiseBound::of_asymp(theta_bound), 200000).verified());
}

TEST_CASE("pointwise pi check agrees with direct evaluation") {
  // Same per-step estimate, sup|pi - Li| / inf(x / log x), from direct Li values.
  const auto& s = small_store();
  const std::uint64_t x_max = 20000;
  std::vector<std::uint64_t> ps;
  s.for_each_prime(2, x_max, [&](std::uint64_t p) { ps.push_back(p); });
  ps.push_back(x_max);
  double worst = 0;
  for (size_t i = 0; i + 1 < ps.size(); ++i) {
    Enclosure a(static_cast<long>(ps[i])), b(static_cast<long>(ps[i + 1])), n(static_cast<long>(i + 1));
    Enclosure num = max(n - li_moderate(a), li_moderate(b) - n);
    Enclosure inf_x_log = ps[i] == 2 ? exp(Enclosure(1L)) : a / log(a);
    worst = std::max(worst, (num / inf_x_log).hi().to_double(Dir::up));
  }
  CHECK(worst == doctest::Approx(0.429725).epsilon(1e-5));  // the step [7, 11)
  auto below = PointwiseBound::of_constant(XReal::from_double(worst * (1 - 1e-9)));
  CHECK_FALSE(verify_pointwise(s, Kind::pi, below, x_max).verified());
  auto above = PointwiseBound::of_constant(XReal::from_double(worst * (1 + 1e-9)));
  CHECK(verify_pointwise(s, Kind::pi, above, x_max).verified());
}

TEST_CASE("Buthe envelope") {
  XReal v = buthe_envelope(log(Enclosure(97L)));
  CHECK(v <= XReal::parse("0.4298", Dir::down));
  CHECK(v >= XReal::parse("0.379", Dir::down));
  CHECK(buthe_envelope(Enclosure(1000L)) < XReal::parse("1e-200", Dir::down));
  // direct high-precision value at 1e10
  PrecisionScope ps(512);
  Enclosure L = log(Enclosure::parse("1e10"));
  Enclosure ref = (Enclosure::parse("1.95") + Enclosure::parse("3.9") / L + Enclosure::parse("19.5") / sqr(L)) /
                  Enclosure(100000L);
  CHECK(Enclosure(buthe_envelope(L)).overlaps(Enclosure(ref.lo(), buthe_envelope(L))));
  CHECK(std::abs(buthe_envelope(L).to_double() / ref.approx() - 1) < 1e-15);
  CHECK(buthe_decreasing_on_grid(log(Enclosure(97L)), log(Enclosure::parse("1e19")), 10000));
  CHECK_THROWS_AS(buthe_envelope(Enclosure(0L)), DomainError);
}

#include "pnt/oracle.hpp"

#include <gmp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <thread>

#include "pnt/special.hpp"

namespace pnt {

namespace {

constexpr int kFracBits = 96;
constexpr char kMagic[8] = {'P', 'N', 'T', 'S', 'I', 'E', 'V', 'E'};
constexpr std::uint32_t kCacheVersion = 1;

unsigned thread_count(unsigned requested) {
  if (requested) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// floor or ceil of v * 2^96 as a nonnegative 128-bit integer
__int128 to_fixed(const XReal& v, Dir d) {
  XReal t(Prec{v.precision() + 8});
  mpfr_mul_2si(t.raw(), v.get(), kFracBits, MPFR_RNDN);  // exact
  mpz_t z;
  mpz_init(z);
  mpfr_get_z(z, t.get(), d == Dir::up ? MPFR_RNDU : MPFR_RNDD);
  if (mpz_sgn(z) < 0 || mpz_sizeinbase(z, 2) > 126) {
    mpz_clear(z);
    throw DomainError("fixed-point value out of range");
  }
  unsigned __int128 out = 0;
  size_t count = 0;
  std::uint64_t words[2] = {0, 0};
  mpz_export(words, &count, -1, sizeof(std::uint64_t), 0, 0, z);
  mpz_clear(z);
  out = (static_cast<unsigned __int128>(words[1]) << 64) | words[0];
  return static_cast<__int128>(out);
}

XReal from_fixed(__int128 v) {
  unsigned __int128 u = static_cast<unsigned __int128>(v);
  std::uint64_t words[2] = {static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(u >> 64)};
  mpz_t z;
  mpz_init(z);
  mpz_import(z, 2, -1, sizeof(std::uint64_t), 0, 0, words);
  XReal r(Prec{std::max<mpfr_prec_t>(working_precision(), 160)});
  mpfr_set_z(r.raw(), z, MPFR_RNDN);  // exact: fewer than 128 bits
  mpz_clear(z);
  mpfr_mul_2si(r.raw(), r.get(), -kFracBits, MPFR_RNDN);
  return r;
}

Enclosure fixed_enclosure(__int128 lo, __int128 hi) { return Enclosure(from_fixed(lo), from_fixed(hi)); }

// Directed double helpers. Results of + - * / are within half an ulp, so one
// step outward bounds them. std::log is taken to be within one ulp and is
// widened by two.
double dn(double v) { return std::nextafter(v, -std::numeric_limits<double>::infinity()); }
double up(double v) { return std::nextafter(v, std::numeric_limits<double>::infinity()); }
double log_dn(double v) { return dn(dn(std::log(v))); }
double log_up(double v) { return up(up(std::log(v))); }

struct DInterval {
  double lo = 0, hi = 0;
};

DInterval to_dinterval(const Enclosure& e) { return {e.lo().to_double(Dir::down), e.hi().to_double(Dir::up)}; }

}  // namespace

Enclosure log_of_product(const std::vector<std::uint64_t>& factors) {
  const mpfr_prec_t bits = 256;
  XReal lo(Prec{bits}), hi(Prec{bits});
  mpfr_set_ui(lo.raw(), 1, MPFR_RNDN);
  mpfr_set_ui(hi.raw(), 1, MPFR_RNDN);
  for (std::uint64_t f : factors) {
    mpfr_mul_ui(lo.raw(), lo.get(), f, MPFR_RNDD);
    mpfr_mul_ui(hi.raw(), hi.get(), f, MPFR_RNDU);
  }
  return Enclosure(xr_arith(Op::log, lo, Dir::down), xr_arith(Op::log, hi, Dir::up));
}

// ---------------------------------------------------------------- PrimeStore

PrimeStore::PrimeStore(std::uint64_t limit, unsigned threads) : limit_(limit) {
  if (limit < 2 || limit > 4000000000ULL) throw DomainError("sieve limit must be in [2, 4e9]");
  sieve(threads);
  build_checkpoints(threads);
}

PrimeStore PrimeStore::with_cache(std::uint64_t limit, const std::string& cache_path, unsigned threads) {
  PrimeStore s{Unbuilt{}};
  s.limit_ = limit;
  s.sieve(threads);
  if (!s.load(cache_path)) {
    s.build_checkpoints(threads);
    s.save(cache_path);
  }
  return s;
}

void PrimeStore::sieve(unsigned threads) {
  const std::uint64_t words = limit_ / 128 + 1;
  bits_.assign(words, ~std::uint64_t{0});
  bits_[0] &= ~std::uint64_t{1};  // 1 is not prime
  // clear bits past the limit
  for (std::uint64_t n = limit_ + 1; n < words * 128; ++n)
    if (n & 1) bits_[n >> 7] &= ~(std::uint64_t{1} << ((n >> 1) & 63));

  std::uint64_t root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit_)));
  while (root * root > limit_) --root;
  while ((root + 1) * (root + 1) <= limit_) ++root;
  std::vector<std::uint8_t> small(root + 1, 1);
  std::vector<std::uint64_t> base;
  for (std::uint64_t i = 3; i <= root; i += 2) {
    if (!small[i]) continue;
    base.push_back(i);
    for (std::uint64_t j = i * i; j <= root; j += 2 * i) small[j] = 0;
  }

  // segments of whole words so threads never share a word
  const std::uint64_t seg_words = 4096;
  const std::uint64_t segments = (words + seg_words - 1) / seg_words;
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t s; (s = next++) < segments;) {
      std::uint64_t lo = s * seg_words * 128, hi = std::min(words, (s + 1) * seg_words) * 128;
      for (std::uint64_t p : base) {
        if (p * p >= hi) break;
        std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
        if (!(start & 1)) start += p;
        for (std::uint64_t m = start; m < hi; m += 2 * p) bits_[m >> 7] &= ~(std::uint64_t{1} << ((m >> 1) & 63));
      }
    }
  };
  std::vector<std::thread> pool;
  unsigned t = thread_count(threads);
  for (unsigned i = 1; i < t; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  powers_.clear();
  for (std::uint64_t p = 2; p <= root; ++p) {
    if (!is_prime(p)) continue;
    for (std::uint64_t q = p * p; q <= limit_; q *= p) {
      powers_.emplace_back(q, p);
      if (q > limit_ / p) break;
    }
  }
  std::sort(powers_.begin(), powers_.end());
}

void PrimeStore::build_checkpoints(unsigned threads) {
  const std::uint64_t blocks = limit_ / kStride + 1;
  std::vector<Checkpoint> delta(blocks);
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    PrecisionScope scope(192);
    for (std::uint64_t b; (b = next++) < blocks;) {
      std::uint64_t lo = b * kStride, hi = std::min(limit_, lo + kStride - 1);
      std::vector<std::uint64_t> ps;
      for_each_prime(lo, hi, [&](std::uint64_t p) { ps.push_back(p); });
      Enclosure th = log_of_product(ps);
      std::vector<std::uint64_t> extra;
      auto it = std::lower_bound(powers_.begin(), powers_.end(), std::make_pair(lo, std::uint64_t{0}));
      for (; it != powers_.end() && it->first <= hi; ++it) extra.push_back(it->second);
      Enclosure ex = log_of_product(extra);
      Checkpoint& c = delta[b];
      c.pi = ps.size();
      c.theta_lo = to_fixed(th.lo(), Dir::down);
      c.theta_hi = to_fixed(th.hi(), Dir::up);
      c.psi_lo = c.theta_lo + to_fixed(ex.lo(), Dir::down);
      c.psi_hi = c.theta_hi + to_fixed(ex.hi(), Dir::up);
    }
  };
  std::vector<std::thread> pool;
  unsigned t = thread_count(threads);
  for (unsigned i = 1; i < t; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  // ordered prefix sums: checkpoints_[b] covers n < b * kStride
  checkpoints_.assign(blocks + 1, Checkpoint{});
  for (std::uint64_t b = 0; b < blocks; ++b) {
    Checkpoint c = checkpoints_[b];
    c.pi += delta[b].pi;
    c.theta_lo += delta[b].theta_lo;
    c.theta_hi += delta[b].theta_hi;
    c.psi_lo += delta[b].psi_lo;
    c.psi_hi += delta[b].psi_hi;
    checkpoints_[b + 1] = c;
  }
}

bool PrimeStore::is_prime(std::uint64_t n) const {
  if (n > limit_) throw AboveLimit("n = " + std::to_string(n) + " exceeds the sieve limit");
  if (n < 2) return false;
  if (!(n & 1)) return n == 2;
  return bit(n);
}

void PrimeStore::for_each_prime(std::uint64_t lo, std::uint64_t hi, const std::function<void(std::uint64_t)>& f) const {
  hi = std::min(hi, limit_);
  if (lo > hi) return;
  if (lo <= 2 && hi >= 2) f(2);
  std::uint64_t start = std::max<std::uint64_t>(lo, 3) | 1;
  if (start > hi) return;
  std::uint64_t w = start >> 7;
  std::uint64_t word = bits_[w] & (~std::uint64_t{0} << ((start >> 1) & 63));
  for (;;) {
    while (word) {
      std::uint64_t n = (w << 7) | (static_cast<std::uint64_t>(__builtin_ctzll(word)) << 1) | 1;
      if (n > hi) return;
      f(n);
      word &= word - 1;
    }
    if (++w >= bits_.size() || (w << 7) > hi) return;
    word = bits_[w];
  }
}

ExactCounts PrimeStore::exact_counts(std::uint64_t x) const {
  if (x > limit_) throw AboveLimit("x = " + std::to_string(x) + " exceeds the sieve limit");
  std::uint64_t b = (x + 1) / kStride;
  const Checkpoint& c = checkpoints_[b];
  std::uint64_t lo = b * kStride;
  std::vector<std::uint64_t> ps;
  for_each_prime(lo, x, [&](std::uint64_t p) { ps.push_back(p); });
  std::vector<std::uint64_t> extra;
  auto it = std::lower_bound(powers_.begin(), powers_.end(), std::make_pair(lo, std::uint64_t{0}));
  for (; it != powers_.end() && it->first <= x; ++it) extra.push_back(it->second);
  ExactCounts out;
  out.pi = static_cast<std::int64_t>(c.pi + ps.size());
  Enclosure th = log_of_product(ps);
  out.theta = fixed_enclosure(c.theta_lo, c.theta_hi) + th;
  out.psi = fixed_enclosure(c.psi_lo, c.psi_hi) + th + log_of_product(extra);
  return out;
}

ExactCounts PrimeStore::exact_counts(const XReal& x) const {
  if (x < XReal(2L)) throw DomainError("exact_counts needs x >= 2");
  if (x > XReal(static_cast<long>(limit_))) throw AboveLimit("x exceeds the sieve limit");
  return exact_counts(static_cast<std::uint64_t>(x.to_long_floor()));
}

bool PrimeStore::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  std::uint64_t stride = kStride, count = checkpoints_.size();
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&kCacheVersion), sizeof kCacheVersion);
  out.write(reinterpret_cast<const char*>(&limit_), sizeof limit_);
  out.write(reinterpret_cast<const char*>(&stride), sizeof stride);
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  out.write(reinterpret_cast<const char*>(checkpoints_.data()), static_cast<std::streamsize>(count * sizeof(Checkpoint)));
  return static_cast<bool>(out);
}

bool PrimeStore::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[8];
  std::uint32_t version = 0;
  std::uint64_t limit = 0, stride = 0, count = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&limit), sizeof limit);
  in.read(reinterpret_cast<char*>(&stride), sizeof stride);
  in.read(reinterpret_cast<char*>(&count), sizeof count);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0 || version != kCacheVersion || limit != limit_ ||
      stride != kStride || count != limit_ / kStride + 2)
    return false;
  std::vector<Checkpoint> cps(count);
  in.read(reinterpret_cast<char*>(cps.data()), static_cast<std::streamsize>(count * sizeof(Checkpoint)));
  if (!in) return false;
  checkpoints_ = std::move(cps);
  return true;
}

// ---------------------------------------------------------------- crossing point

Enclosure theta_37() { return log_of_product({2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}); }

namespace {

// (12 - Li(x)) log x - theta(37) + x: x / log x times the signed discrepancy on
// [37, 41). Its derivative is (12 - Li(x)) / x < 0 there.
Enclosure crossing_g(const Enclosure& x, const Enclosure& th) {
  return (Enclosure(12L) - li_moderate(x)) * log(x) - th + x;
}

}  // namespace

Enclosure crossing_point() {
  Enclosure th = theta_37();
  XReal lo(37L), hi(41L);
  if (!crossing_g(Enclosure(lo), th).positive() || !crossing_g(Enclosure(hi), th).negative())
    throw DomainError("no sign change of the discrepancy on (37, 41)");
  XReal stop = XReal::parse("1e-30", Dir::down);
  while (xr_arith(Op::sub, hi, lo, Dir::up) > stop) {
    XReal m = Enclosure(lo, hi).mid();
    Enclosure g = crossing_g(Enclosure(m), th);
    if (g.positive())
      lo = m;
    else if (g.negative())
      hi = m;
    else
      break;
  }
  return Enclosure(lo, hi);
}

ExactAnchor crossing_anchor() {
  ExactAnchor a;
  a.name = "crossing";
  a.x0 = crossing_point();
  a.pi_x0 = 12;
  a.theta_x0 = theta_37();
  a.li_x0 = li_moderate(a.x0);
  a.provenance = "computed: zero of the anchor discrepancy between the primes 37 and 41";
  a.oracle_verifiable = true;
  return a;
}

// ---------------------------------------------------------------- pointwise

PointwiseBound PointwiseBound::of_asymp(const AsymptoticBound& b) {
  return {[b](const Enclosure& L) { return eval_asymp(b, L, Dir::down); }, std::nullopt};
}

PointwiseReport verify_pointwise(const PrimeStore& store, Kind kind, const PointwiseBound& bound, std::uint64_t x_max,
                                 std::uint64_t x_min) {
  if (x_max > store.limit()) throw AboveLimit("x_max exceeds the sieve limit");
  PointwiseReport rep;
  if (x_max < 2) return rep;
  const double c_dn = bound.constant ? bound.constant->to_double(Dir::down) : 0;
  auto bound_at = [&](std::uint64_t a, std::uint64_t b) {
    if (bound.constant) return c_dn;
    double ba = bound.fn(log(Enclosure(static_cast<long>(a)))).to_double(Dir::down);
    double bb = bound.fn(log(Enclosure(static_cast<long>(b)))).to_double(Dir::down);
    return std::min(ba, bb);
  };
  auto record = [&](std::uint64_t a, std::uint64_t b, double err) {
    ++rep.gaps_checked;
    double bd = bound_at(a, b);
    double ratio = bd > 0 ? err / bd : (err > 0 ? std::numeric_limits<double>::infinity() : 0);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (err > bd) {
      ++rep.violation_count;
      if (rep.violations.size() < 100) rep.violations.push_back({a, b, err, bd});
    }
  };

  // Li as a double interval: exact below 4096 and once per stride, else midpoint and
  // trapezoid brackets (1/log t is convex and decreasing).
  std::uint64_t li_at = 2, li_block = 0;
  DInterval li{0, 0};
  auto li_to = [&](std::uint64_t b) {
    if (b == li_at) return li;
    if (b < 4096 || b / PrimeStore::kStride != li_block || b - li_at > 4096) {
      li = to_dinterval(li_moderate(Enclosure(static_cast<long>(b))));
      li_block = b / PrimeStore::kStride;
    } else {
      double h = static_cast<double>(b - li_at);
      double mid = (static_cast<double>(b) + static_cast<double>(li_at)) / 2;  // exact
      double lo_inc = dn(h / log_up(mid));
      double hi_inc = up(up(up(1 / log_dn(static_cast<double>(li_at))) + up(1 / log_dn(static_cast<double>(b)))) * h / 2);
      li = {dn(li.lo + lo_inc), up(li.hi + hi_inc)};
    }
    li_at = b;
    return li;
  };

  // one step [a, b) on which the counting function is constant
  std::int64_t count = 0;
  DInterval sum{0, 0};
  auto close_step = [&](std::uint64_t a, std::uint64_t b) {
    if (b <= x_min) return;
    a = std::max(a, x_min);  // pi, theta, psi are still constant on the clipped step
    double err = 0;
    double fa = static_cast<double>(a), fb = static_cast<double>(b);
    if (kind == Kind::pi) {
      DInterval la = li_to(a);
      DInterval lb = li_to(b);
      double n = static_cast<double>(count);
      double num = std::max(up(n - la.lo), up(lb.hi - n));
      double inf_x_log = a >= 3 ? dn(fa / log_up(fa)) : 2.718281828;  // x / log x has its minimum e in [2, 3)
      err = num <= 0 ? 0 : up(num / inf_x_log);
    } else {
      double ea = std::max(up(up(sum.hi - fa) / fa), up(up(fa - sum.lo) / fa));
      double eb = std::max(up(up(sum.hi - fb) / fb), up(up(fb - sum.lo) / fb));
      err = std::max(std::max(ea, eb), 0.0);
    }
    record(a, b, err);
  };

  std::uint64_t prev = 2;
  std::uint64_t state_block = std::numeric_limits<std::uint64_t>::max();
  auto step_to = [&](std::uint64_t v, std::uint64_t log_base) {
    if (v > prev) close_step(prev, v);
    prev = v;
    if (kind == Kind::pi) {
      ++count;
      return;
    }
    if (v / PrimeStore::kStride != state_block) {
      ExactCounts c = store.exact_counts(v);
      sum = to_dinterval(kind == Kind::theta ? c.theta : c.psi);
      state_block = v / PrimeStore::kStride;
    } else {
      double l = static_cast<double>(log_base);
      sum = {dn(sum.lo + log_dn(l)), up(sum.hi + log_up(l))};
    }
  };

  const auto& powers = store.prime_powers();
  size_t pw = 0;
  store.for_each_prime(2, x_max, [&](std::uint64_t p) {
    if (kind == Kind::psi)
      for (; pw < powers.size() && powers[pw].first < p; ++pw) step_to(powers[pw].first, powers[pw].second);
    step_to(p, p);
  });
  if (kind == Kind::psi)
    for (; pw < powers.size() && powers[pw].first <= x_max; ++pw) step_to(powers[pw].first, powers[pw].second);
  // last step [prev, x_max], closed at x_max
  if (x_max > prev) close_step(prev, x_max);
  return rep;
}

// ---------------------------------------------------------------- envelope

XReal buthe_envelope(const Enclosure& log_x) {
  if (log_x.lo() < Enclosure::ln2().lo()) throw DomainError("buthe_envelope needs x >= 2");
  const Enclosure& L = log_x;
  Enclosure v = exp(-L / Enclosure(2L)) *
                (Enclosure::parse("1.95") + Enclosure::parse("3.9") / L + Enclosure::parse("19.5") / sqr(L));
  return v.hi();
}

bool buthe_decreasing_on_grid(const Enclosure& log_lo, const Enclosure& log_hi, long nodes) {
  if (nodes < 2) return true;
  auto value = [](const Enclosure& L) {
    return exp(-L / Enclosure(2L)) *
           (Enclosure::parse("1.95") + Enclosure::parse("3.9") / L + Enclosure::parse("19.5") / sqr(L));
  };
  Enclosure h = (log_hi - log_lo) / Enclosure(nodes - 1);
  Enclosure prev = value(log_lo);
  for (long k = 1; k < nodes; ++k) {
    Enclosure cur = value(log_lo + h * Enclosure(k));
    if (!certainly_lt(cur, prev)) return false;
    prev = cur;
  }
  return true;
}

}  // namespace pnt

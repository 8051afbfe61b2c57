#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace vaq {

// Deterministic RNG wrapper. The engine is std::mt19937_64; the
// distributions are implemented here instead of <random> so that generated
// datasets are byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Rejection-free modulo bias is negligible for
  // the desk-scale ranges used here, but do it properly anyway.
  std::uint64_t uniform_u64(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    uniform_u64(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // Standard normal via Box-Muller (no cached spare; keeps state trivial).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  double lognormal(double mu, double sigma) {
    return std::exp(mu + sigma * normal());
  }

  // Zipf-like rank draw over [0, n): P(k) proportional to 1/(k+1)^s.
  // Inverse-CDF over precomputed weights is overkill at our vocabulary
  // sizes, so do linear search on the cumulative table the caller keeps.
  std::size_t zipf(const std::vector<double> &cumulative) {
    const double u = uniform() * cumulative.back();
    std::size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cumulative[mid] < u)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

  // Partial Fisher-Yates: first k entries of a random permutation of [0, n).
  std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n,
                                                        std::uint32_t k);

  std::mt19937_64 &engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline std::vector<std::uint32_t> Rng::sample_without_replacement(
    std::uint32_t n, std::uint32_t k) {
  if (k > n) k = n;
  std::vector<std::uint32_t> ids(n);
  for (std::uint32_t i = 0; i < n; ++i) ids[i] = i;
  for (std::uint32_t i = 0; i < k; ++i) {
    const auto j =
        i + static_cast<std::uint32_t>(uniform_u64(n - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(k);
  return ids;
}

inline std::vector<double> zipf_cumulative(std::size_t n, double s) {
  std::vector<double> cum(n);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += 1.0 / std::pow(static_cast<double>(k + 1), s);
    cum[k] = acc;
  }
  return cum;
}

// Stable seed derivation for independent substreams.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a + 0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace vaq

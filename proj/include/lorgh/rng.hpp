#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace lorgh {

// Seeded generator with platform-independent derived draws.
// std::mt19937_64 output is fixed by the standard; the std distributions are not,
// so the conversions below are spelled out.
class Rng {
 public:
  static constexpr const char* kName = "mt19937_64/v1";

  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // uniform in [0,1)
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // uniform in {0,...,n-1}, n > 0, by rejection
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do x = gen_();
    while (x >= limit);
    return x % n;
  }

  // Poisson variate by sequential inversion; large means are split into chunks
  // so exp(-chunk) never underflows.
  std::uint64_t poisson(double mean) {
    constexpr double kChunk = 32.0;
    std::uint64_t total = 0;
    while (mean > 0) {
      const double m = std::min(mean, kChunk);
      mean -= m;
      const double u = uniform01();
      double p = std::exp(-m);
      double cdf = p;
      std::uint64_t k = 0;
      while (u >= cdf && p > 0) {
        ++k;
        p *= m / static_cast<double>(k);
        cdf += p;
      }
      total += k;
    }
    return total;
  }

  // splitmix64 step, used to derive independent sub-seeds
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace lorgh

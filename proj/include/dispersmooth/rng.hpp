#pragma once

#include <cmath>
#include <cstdint>

namespace dispersmooth {

inline constexpr std::uint64_t kDefaultSeed = 0xD15EA5E;

/// Counter-based generator: draw i of stream s is a pure function of
/// (seed, s, i), so results never depend on evaluation order or threading.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed = kDefaultSeed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ULL))) {}

  std::uint64_t bits(std::uint64_t counter) const { return mix(key_ + counter * 0x9E3779B97F4A7C15ULL); }

  /// Uniform in [0, 1).
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
  }

  /// Standard normal via Box-Muller on two consecutive counters.
  double normal(std::uint64_t counter) const {
    const double u1 = 1.0 - uniform((1ULL << 62) + 2 * counter);
    const double u2 = uniform((1ULL << 62) + 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

/// Sequential convenience view over the counter space of one generator.
class RngStream {
 public:
  explicit RngStream(const CounterRng& rng) : rng_(rng) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return rng_.uniform(next_++, lo, hi); }
  double normal() { return rng_.normal(next_++); }
  std::uint64_t index(std::uint64_t n) { return rng_.bits(next_++) % n; }

 private:
  CounterRng rng_;
  std::uint64_t next_ = 0;
};

}  // namespace dispersmooth

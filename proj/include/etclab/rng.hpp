#pragma once

#include <cstdint>

namespace etclab {

/// SplitMix64 mixing function (Steele et al.): maps a counter to a
/// well-scrambled 64-bit word.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Key for an independent substream (one per Monte Carlo trajectory).
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed + 0x9E3779B97F4A7C15ull * (index + 1));
}

/// Counter-based uniform generator: the i-th output is a pure function of
/// (key, i), so streams are splittable and replayable.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() {
    return mix64(key_ + 0x9E3779B97F4A7C15ull * ++counter_);
  }

  /// Uniform draw in (0, 1].
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53;
  }

  /// Uniform draw in [lo, hi).
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next_u64() >> 11) * 0x1p-53);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Standard normal stream (Box–Muller on counter-based uniforms).
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t key) : rng_(key) {}

  double next();

 private:
  CounterRng rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace etclab

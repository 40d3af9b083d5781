#pragma once

#include <cstdint>

namespace rchaos {

/// Counter-based splittable generator (splitmix64 finalizer in counter mode).
///
/// Streams derive deterministically from a seed and up to two stream ids:
///   stream_k = hash(seed, k)
/// so a draw for (sample i, coordinate k) depends only on (seed, i, k) and is
/// reproducible independent of thread scheduling.
class CounterRng {
 public:
  static constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  static uint64_t mix(uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
  }

  static CounterRng stream(uint64_t seed, uint64_t id) {
    uint64_t h = mix(seed + kGolden);
    h = mix(h ^ mix(id + 2 * kGolden));
    return CounterRng(h);
  }

  static CounterRng stream(uint64_t seed, uint64_t a, uint64_t b) {
    uint64_t h = mix(seed + kGolden);
    h = mix(h ^ mix(a + 2 * kGolden));
    h = mix(h ^ mix(b + 3 * kGolden));
    return CounterRng(h);
  }

  explicit CounterRng(uint64_t state = 0) : state_(state) {}

  uint64_t next_u64() {
    state_ += kGolden;
    return mix(state_);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double next_unit_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double next_gaussian();

  /// Uniform integer in [0, n).
  uint64_t next_below(uint64_t n) { return next_u64() % n; }

 private:
  uint64_t state_;
};

}  // namespace rchaos

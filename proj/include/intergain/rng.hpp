#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>

namespace intergain {

/// Counter-based deterministic generator. The i-th output of stream s
/// under master seed k is mix64(key(k, s) + i * GAMMA) where mix64 is the
/// splitmix64 finalizer, so every value is a pure function of
/// (seed, stream, counter). Replicates that derive their stream from
/// (seed, replicate index) are independent of thread scheduling.
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed + kGamma * mix(stream + kGamma))) {}

  std::uint64_t next_u64() { return mix(key_ + kGamma * ++counter_); }

  /// Uniform double in [0, 1), 53 bits of mantissa.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Unbiased integer in [0, n); n must be > 0.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double next_gaussian() {
    double u1 = next_double();
    const double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Fisher-Yates, back to front.
  template <class T>
  void shuffle(std::span<T> a) {
    for (std::size_t i = a.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(a[i - 1], a[j]);
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace intergain

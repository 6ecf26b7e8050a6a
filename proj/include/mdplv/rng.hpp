#pragma once

#include <cstdint>
#include <span>

namespace mdplv {

// SplitMix64: counter-based generator (Weyl increment + finalizer mix).
// Deterministic for a given seed on every platform; split() derives an
// independent stream so fixtures can fan out without sharing state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased integer in [0, bound) via rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = -bound % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  SplitMix64 split() { return SplitMix64(next_u64() ^ 0x6a09e667f3bcc909ULL); }

  // Index into a distribution given by cumulative double weights.
  std::size_t sample_cdf(std::span<const double> cumulative) {
    const double x = next_double();
    for (std::size_t i = 0; i + 1 < cumulative.size(); ++i) {
      if (x < cumulative[i]) return i;
    }
    return cumulative.empty() ? 0 : cumulative.size() - 1;
  }

 private:
  std::uint64_t state_;
};

}  // namespace mdplv

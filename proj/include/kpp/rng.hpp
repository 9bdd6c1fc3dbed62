#pragma once

#include <cstdint>

namespace kpp {

/// SplitMix64 (Steele, Lea, Flood 2014). Small, fast, and reproducible from
/// its three constants in any language.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform integer in [1, n]; rejection sampling removes modulo bias.
  constexpr std::uint64_t uniform(std::uint64_t n) {
    // 2^64 mod n, computed without 128-bit arithmetic.
    const std::uint64_t threshold = (0 - n) % n;
    std::uint64_t x = next();
    while (x < threshold) x = next();
    return 1 + x % n;
  }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

 private:
  std::uint64_t state_;
};

/// Independent stream seed for one (index) under a parent seed.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return SplitMix64::mix(parent + SplitMix64::kGamma * (index + 1));
}

}  // namespace kpp

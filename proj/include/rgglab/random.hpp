#pragma once

// Seeded pseudo-random streams for reproducible trials.
//
// Every trial draws from its own xoshiro256** stream. The stream state is
// expanded from a 64-bit sub-seed with SplitMix64, and the sub-seed of trial
// k is SplitMix64(master ^ k). The derivation is a pure function of
// (master, k), so trials can be scheduled in any order on any thread.

#include <array>
#include <bit>
#include <cstdint>
#include <limits>

namespace rgglab {

/// One SplitMix64 output step applied to `x` (stateless mixer).
constexpr std::uint64_t splitmix64_mix(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  constexpr std::uint64_t operator()() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Master seed of an experiment.
struct RandomSeed {
  std::uint64_t master = 0;

  /// Sub-seed of trial `k`.
  [[nodiscard]] constexpr RandomSeed trial(std::uint64_t k) const noexcept {
    return RandomSeed{splitmix64_mix(master ^ k)};
  }

  friend constexpr bool operator==(RandomSeed, RandomSeed) = default;
};

/// xoshiro256** 1.0 (Blackman & Vigna), seeded through SplitMix64.
/// Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256(RandomSeed seed) noexcept {
    SplitMix64 sm(seed.master);
    for (auto& word : s_) word = sm();
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with a 53-bit mantissa.
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace rgglab

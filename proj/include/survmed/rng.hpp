#pragma once

// Portable seeded randomness. Every stream is a xoshiro256** generator whose
// state is expanded by splitmix64 from (seed, stream index[, sub index]), so a
// draw depends only on those keys and never on scheduling or partitioning.
// Uniform doubles are built from the top 53 bits; no <random> distributions
// are used because their output is implementation-defined.

#include <cstddef>
#include <cstdint>

namespace survmed {

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b) noexcept {
  std::uint64_t s = a;
  std::uint64_t h = splitmix64(s);
  s = h ^ b;
  return splitmix64(s);
}

class Xoshiro256 {
public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256(std::uint64_t seed) noexcept {
    std::uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  /// Stream for (seed, index); the stream-splitting rule.
  static constexpr Xoshiro256 stream(std::uint64_t seed, std::uint64_t index,
                                     std::uint64_t sub = 0) noexcept {
    return Xoshiro256(mix_keys(mix_keys(seed, index), sub));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1).
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer on [0, n), n >= 1 (multiply-shift, bias below 2^-64 n).
  constexpr std::size_t below(std::size_t n) noexcept {
    const auto wide = static_cast<unsigned __int128>((*this)()) * n;
    return static_cast<std::size_t>(wide >> 64);
  }

private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4]{};
};

} // namespace survmed

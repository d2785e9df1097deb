#pragma once

#include <cstddef>
#include <cstdint>

// Counter-based draws: every value is a pure function of (key, counter), so a
// trajectory's row sequence does not depend on how many other draws happened.
namespace eigsgd::rng {

/// SplitMix64 output function (Steele, Lea & Flood).
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix(std::uint64_t key, std::uint64_t counter) noexcept {
  return splitmix64(splitmix64(key) ^ splitmix64(counter ^ 0xD1B54A32D192ED03ULL));
}

/// Uniform integer in [0, n). Lemire's multiply-shift; bias is at most n / 2^64.
inline std::size_t uniform_index(std::uint64_t key, std::uint64_t counter, std::size_t n) noexcept {
  __extension__ using u128 = unsigned __int128;
  const u128 wide = static_cast<u128>(mix(key, counter)) * static_cast<u128>(n);
  return static_cast<std::size_t>(wide >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double unit_interval(std::uint64_t key, std::uint64_t counter) noexcept {
  return static_cast<double>(mix(key, counter) >> 11) * 0x1.0p-53;
}

/// Seed for repetition `index` of a plan rooted at `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return mix(base ^ 0xA0761D6478BD642FULL, index);
}

}  // namespace eigsgd::rng

#pragma once

#include <cstdint>
#include <random>

namespace skewscore {

/// All randomness in the library flows through explicitly passed generators of this type.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; maps (seed, stream) pairs to well-separated generator seeds.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream = 0) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) { return Rng(mix_seed(seed, stream)); }

/// Child generator. Always consumes exactly one draw from the parent.
inline Rng fork(Rng& parent) { return Rng(mix_seed(parent())); }

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

}  // namespace skewscore

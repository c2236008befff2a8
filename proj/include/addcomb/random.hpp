#pragma once

// Seeded sampling helpers. Every random sample is drawn from its own generator,
// seeded from (run seed, sample index), so samples can be produced in any order
// or in parallel and still come out identical.

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <string>

#include "addcomb/numeric.hpp"

namespace addcomb {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) { return splitmix64(splitmix64(seed) ^ index); }

inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) { return std::mt19937_64(sample_seed(seed, index)); }

/// Uniform integer in [lo, hi]; reduction by modulo keeps the stream identical across standard libraries.
inline long draw(std::mt19937_64& rng, long lo, long hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<long>(rng() % span);
}

/// Default seed: TOOLKIT_SEED if set, otherwise `fallback`.
inline std::uint64_t default_seed(std::uint64_t fallback = 0) {
  if (const char* env = std::getenv("TOOLKIT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(std::string("TOOLKIT_SEED is not an unsigned integer: ") + env);
    }
  }
  return fallback;
}

}  // namespace addcomb

#pragma once

#include <cstdint>
#include <random>

namespace cusplab {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Sub-seed of stream `index` under `master`:
///   splitmix64(master XOR splitmix64(index + 1)).
/// Mixing the index before folding it into the master keeps neighbouring
/// indices (and neighbouring masters) far apart in seed space.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t index) {
  return Rng(derive_seed(master, index));
}

}  // namespace cusplab

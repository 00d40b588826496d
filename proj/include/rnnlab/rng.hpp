#pragma once

#include <cstdint>
#include <random>

namespace rnnlab {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

inline Rng make_rng(uint64_t seed) { return Rng(splitmix64(seed)); }

// Independent substream, e.g. one per restart.
inline Rng make_rng(uint64_t seed, uint64_t substream) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(substream + 1)));
}

}  // namespace rnnlab

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace modref {

/// splitmix64 step; used to derive independent sub-seeds from one root seed
/// so that per-scene / per-frame randomness is stable no matter the order in
/// which work is executed.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Derive a sub-seed from (seed, stream tag, index).
inline uint64_t derive_seed(uint64_t seed, std::string_view stream, uint64_t index = 0) {
  uint64_t h = seed ^ 0x9e3779b97f4a7c15ull;
  for (char c : stream) {
    h ^= static_cast<uint64_t>(static_cast<unsigned char>(c));
    h *= 0x100000001b3ull;
  }
  h ^= index + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  uint64_t s = h;
  return splitmix64(s);
}

inline std::mt19937_64 make_rng(uint64_t seed, std::string_view stream, uint64_t index = 0) {
  return std::mt19937_64(derive_seed(seed, stream, index));
}

}  // namespace modref

#pragma once

#include <cstdint>

namespace moesim {

// Counter-based generator: every value is a pure function of
// (seed, layer, token, draw), so traces are reproducible regardless of
// sampling order or parallelism.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t layer,
                                  std::uint64_t token, std::uint64_t draw) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ mix64(layer));
  h = mix64(h ^ mix64(token));
  h = mix64(h ^ mix64(draw));
  return h;
}

// Uniform double in [0, 1) from the top 53 bits.
inline double counter_uniform(std::uint64_t seed, std::uint64_t layer,
                              std::uint64_t token, std::uint64_t draw) {
  return static_cast<double>(counter_hash(seed, layer, token, draw) >> 11) *
         0x1.0p-53;
}

}  // namespace moesim

#pragma once

#include <cstdint>

namespace edgekit {

// splitmix64 step; also the mixer used for seed derivation and the
// counter-based dropout mask stream.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix64(s);
}

// Deterministic sub-seed: all randomness in the tool flows from one root seed,
// split by fixed stream ids.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix64(base ^ mix64(stream + 0x51ED2701A43B5ull));
}

// Stateless hash of a (seed, a, b) triple; used where parallel workers need
// per-item randomness that must not depend on scheduling.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix64(seed ^ mix64(a + 0x9E3779B97F4A7C15ull) ^ mix64(b + 0xC2B2AE3D27D4EB4Full));
}

}  // namespace edgekit

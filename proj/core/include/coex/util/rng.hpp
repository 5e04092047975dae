#pragma once

#include <cstdint>
#include <random>

namespace coex {

inline std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent random streams derived from one master seed. Every consumer
/// of randomness inside a run owns its own stream, so adding draws to one
/// subsystem never perturbs another (a requirement for the exact-reduction
/// contracts between algorithm variants).
enum class Stream : std::uint64_t {
  env = 1,
  actions = 2,
  replay = 3,
  projector = 4,
  init = 5,
  eval = 6,
};

inline std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
  return std::mt19937_64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(stream)));
}

}  // namespace coex

#pragma once

// Seed derivation and bounded draws for reproducible trials.

#include <cstddef>
#include <cstdint>
#include <random>

namespace nbwalk {

using Engine = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of trial i: mix64(master ^ mix64(i + golden gamma)).
constexpr std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) noexcept {
  return mix64(master ^ mix64(trial + 0x9e3779b97f4a7c15ULL));
}

inline std::size_t uniform_below(Engine& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace nbwalk

#pragma once

// Seed derivation. Every random stream in the project is keyed by
// (master seed, purpose, index...) through SplitMix64 mixing, so rollouts
// and per-visit coin flips are reproducible independently of scheduling.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace hotspot {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Mixes a key sequence into one 64-bit value.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(master);
  for (auto k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

/// Uniform in [0, 1) from a hash; used for coins that must not consume a stream.
constexpr double hash_uniform(std::uint64_t h) {
  return static_cast<double>(splitmix64(h) >> 11) * 0x1.0p-53;
}

/// Stream purposes, kept stable so that derived seeds never collide.
enum class Stream : std::uint64_t {
  Population = 1,
  Sites = 2,
  Traces = 3,
  Simulation = 4,
  Seeding = 5,
  VisitCoins = 6,
  Compliance = 7,
  Downscale = 8,
  Curfew = 9,
};

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

/// Exponential(rate) via inversion; rate must be positive.
inline double exponential(Rng& rng, double rate) {
  return -std::log1p(-uniform01(rng)) / rate;
}

}  // namespace hotspot

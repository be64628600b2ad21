#pragma once

#include <cstdint>
#include <random>

namespace cfmac {

using Rng = std::mt19937_64;

/// Stateless 64-bit mixer (splitmix64 finaliser) combining two words.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

enum class StreamKind : std::uint64_t { Protocol = 1, Traffic = 2, Channel = 3, Replication = 4 };

/// Independent stream for (run seed, index, kind). Station j's streams do not
/// depend on how many other stations exist.
Rng make_stream(std::uint64_t run_seed, std::uint64_t index, StreamKind kind);

/// Seed of replication `rep` under `base_seed`.
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t rep);

/// Uniform integer in [lo, hi].
inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace cfmac

#include "cfmac/rng.hpp"

namespace cfmac {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng make_stream(std::uint64_t run_seed, std::uint64_t index, StreamKind kind) {
  return Rng(mix_seed(mix_seed(run_seed, static_cast<std::uint64_t>(kind)), index));
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t rep) {
  return mix_seed(mix_seed(base_seed, static_cast<std::uint64_t>(StreamKind::Replication)), rep);
}

}  // namespace cfmac

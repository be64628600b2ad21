#include <algorithm>
#include <map>
#include <numeric>

#include "cfmac/markov.hpp"

namespace cfmac {

int CollisionState::colliding() const { return std::accumulate(parts.begin(), parts.end(), 0); }

int CollisionState::collision_slots() const { return static_cast<int>(parts.size()); }

namespace {

void extend(int remaining, int min_part, std::vector<int>& prefix, std::vector<CollisionState>& out) {
  if (remaining == 0) {
    out.push_back({prefix});
    return;
  }
  for (int part = min_part; part <= remaining; ++part) {
    // A tail shorter than 2 can never be completed.
    if (remaining - part == 1) continue;
    prefix.push_back(part);
    extend(remaining - part, part, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<CollisionState> partitions_at_least_two(int n) {
  std::vector<CollisionState> out;
  if (n < 2) return out;
  std::vector<int> prefix;
  extend(n, 2, prefix, out);
  // Fewer collision slots first: (6), (2,4), (3,3), (2,2,2).
  std::stable_sort(out.begin(), out.end(), [](const CollisionState& a, const CollisionState& b) {
    return a.parts.size() < b.parts.size();
  });
  return out;
}

std::vector<CollisionState> enumerate_states(int stations) {
  std::vector<CollisionState> out;
  for (int nc = stations; nc >= 2; --nc) {
    auto block = partitions_at_least_two(nc);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

double symmetry_count(const CollisionState& state) {
  std::map<int, int> mult;
  for (int p : state.parts) ++mult[p];
  double r = 1.0;
  for (const auto& [part, count] : mult)
    for (int i = 2; i <= count; ++i) r *= i;
  return r;
}

}  // namespace cfmac

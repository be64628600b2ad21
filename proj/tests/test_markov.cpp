#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <map>

#include "cfmac/kernels.hpp"
#include "cfmac/markov.hpp"
#include "cfmac/metrics.hpp"

using namespace cfmac;

namespace {

using Dist = std::map<std::vector<int>, double>;  // empty key = absorbed

// Every colliding station independently stays or jumps to one of the idle
// slots; enumerate all joint choices and count the resulting occupancies per
// number of stayers. Weights are applied afterwards.
using Counts = std::map<std::pair<std::vector<int>, int>, std::int64_t>;

Counts brute_force_counts(const CollisionState& from, int length, int stations) {
  const int n_c = from.collision_slots();
  const int n_i = from.idle_slots(length, stations);
  std::vector<int> home;  // collision slot of each colliding station
  for (int s = 0; s < n_c; ++s)
    for (int k = 0; k < from.parts[s]; ++k) home.push_back(s);
  const int movers = static_cast<int>(home.size());
  Counts out;
  if (n_i == 0) {
    out[{from.parts, movers}] = 1;
    return out;
  }
  std::vector<int> choice(movers, 0);  // 0 = stay, 1..n_i = idle slot
  while (true) {
    std::vector<int> occ(n_c + n_i, 0);
    int stay = 0;
    for (int m = 0; m < movers; ++m) {
      stay += choice[m] == 0;
      ++occ[choice[m] == 0 ? home[m] : n_c + choice[m] - 1];
    }
    std::vector<int> parts;
    for (int o : occ)
      if (o >= 2) parts.push_back(o);
    std::sort(parts.begin(), parts.end());
    ++out[{parts, stay}];
    int m = 0;
    while (m < movers && ++choice[m] == n_i + 1) choice[m++] = 0;
    if (m == movers) break;
  }
  return out;
}

Dist weigh(const Counts& counts, const CollisionState& from, int length, int stations, double gamma) {
  const int n_i = from.idle_slots(length, stations);
  const int movers = from.colliding();
  Dist out;
  for (const auto& [key, n] : counts) {
    const auto& [parts, stay] = key;
    const double w = n_i == 0 ? 1.0 : std::pow(gamma, stay) * std::pow((1 - gamma) / n_i, movers - stay);
    out[parts] += static_cast<double>(n) * w;
  }
  return out;
}

Dist as_map(const NextStates& row) {
  Dist d;
  for (const auto& [state, p] : row) d[state ? state->parts : std::vector<int>{}] += p;
  return d;
}

double max_diff(const Dist& a, const Dist& b) {
  double worst = 0.0;
  for (const auto& [k, p] : a) worst = std::max(worst, std::abs(p - (b.count(k) ? b.at(k) : 0.0)));
  for (const auto& [k, p] : b) worst = std::max(worst, std::abs(p - (a.count(k) ? a.at(k) : 0.0)));
  return worst;
}

// All C^N first-schedule placements.
Dist brute_force_initial(int length, int stations) {
  std::map<std::vector<int>, std::int64_t> counts;
  std::vector<int> pick(stations, 0);
  while (true) {
    std::vector<int> occ(length, 0);
    for (int s : pick) ++occ[s];
    std::vector<int> parts;
    for (int o : occ)
      if (o >= 2) parts.push_back(o);
    std::sort(parts.begin(), parts.end());
    ++counts[parts];
    int m = 0;
    while (m < stations && ++pick[m] == length) pick[m++] = 0;
    if (m == stations) break;
  }
  Dist out;
  for (const auto& [parts, n] : counts) out[parts] = static_cast<double>(n) / std::pow(static_cast<double>(length), stations);
  return out;
}

}  // namespace

TEST_CASE("partitions into parts of at least two") {
  const std::map<int, std::size_t> counts{{2, 1}, {3, 1}, {4, 2}, {5, 2}, {6, 4}, {7, 4}, {8, 7}, {9, 8}, {10, 12}};
  for (auto [n, c] : counts) {
    const auto ps = partitions_at_least_two(n);
    CHECK(ps.size() == c);
    for (const auto& p : ps) {
      int sum = 0;
      for (int x : p.parts) {
        CHECK(x >= 2);
        sum += x;
      }
      CHECK(sum == n);
      CHECK(std::is_sorted(p.parts.begin(), p.parts.end()));
    }
  }
  CHECK(partitions_at_least_two(1).empty());
  const auto six = partitions_at_least_two(6);
  CHECK(six[0].parts == std::vector<int>{6});
  CHECK(six.back().parts == std::vector<int>{2, 2, 2});
}

TEST_CASE("state enumeration and bookkeeping") {
  const auto states = enumerate_states(5);
  // N_C = 5: (5),(2,3); 4: (4),(2,2); 3: (3); 2: (2)
  CHECK(states.size() == 6);
  CHECK(states.front().colliding() == 5);
  CHECK(states.back().parts == std::vector<int>{2});
  const CollisionState s{{2, 2, 3}};
  CHECK(s.colliding() == 7);
  CHECK(s.collision_slots() == 3);
  CHECK(s.idle_slots(16, 10) == 16 - 10 + 7 - 3);
  CHECK(symmetry_count(s) == 2.0);
  CHECK(symmetry_count(CollisionState{{2, 3, 4}}) == 1.0);
  CHECK(symmetry_count(CollisionState{{2, 2, 2}}) == 6.0);
}

TEST_CASE("exact transition rows match per-station brute force") {
  for (int stations = 2; stations <= 6; ++stations)
    for (int length = stations; length <= 8; ++length)
      for (const auto& from : enumerate_states(stations)) {
        const auto counts = brute_force_counts(from, length, stations);
        for (double gamma : {0.2, 0.5, 0.8}) {
          const auto oracle = weigh(counts, from, length, stations, gamma);
          CHECK(max_diff(as_map(transition_row_enumerated(from, length, stations, gamma)), oracle) <= 1e-14);
          CHECK(max_diff(as_map(transition_row(from, length, stations, gamma)), oracle) <= 1e-14);
        }
      }
}

TEST_CASE("recursive and enumerated rows agree on larger cases") {
  for (int stations : {9, 12})
    for (const auto& from : enumerate_states(stations)) {
      if (from.collision_slots() > 3) continue;
      const auto a = as_map(transition_row_enumerated(from, 16, stations, 0.3));
      const auto b = as_map(transition_row(from, 16, stations, 0.3));
      CHECK(max_diff(a, b) <= 1e-12);
    }
}

TEST_CASE("closed sum for same-block transitions matches the exact row") {
  for (int stations = 2; stations <= 7; ++stations)
    for (int length : {stations, stations + 3})
      for (double gamma : {0.1, 0.5, 0.9})
        for (const auto& from : enumerate_states(stations)) {
          const auto exact = as_map(transition_row(from, length, stations, gamma));
          for (const auto& to : enumerate_states(stations)) {
            if (to.colliding() != from.colliding()) continue;
            const double e = exact.count(to.parts) ? exact.at(to.parts) : 0.0;
            CHECK(std::abs(transition_prob_formula(from, to, length, stations, gamma) - e) <= 1e-12);
          }
        }
}

TEST_CASE("first-schedule distribution matches balls in bins") {
  for (int stations = 2; stations <= 6; ++stations)
    for (int length = stations; length <= 7; ++length)
      CHECK(max_diff(as_map(initial_probs(length, stations)), brute_force_initial(length, stations)) <= 1e-14);
  // Two pairs among four stations in four slots: 36 of the 256 placements.
  const auto d = as_map(initial_probs(4, 4));
  CHECK(d.at({2, 2}) == doctest::Approx(36.0 / 256).epsilon(1e-14));
  CHECK(d.at({}) == doctest::Approx(24.0 / 256).epsilon(1e-14));
}

TEST_CASE("chain rows are stochastic and blocks are ordered") {
  const auto chain = build_chain(10, 8, 0.4);
  CHECK(chain.pi.rows() == chain.transient_count() + 1);
  for (int r = 0; r < chain.pi.rows(); ++r) {
    CHECK(chain.pi.row(r).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(chain.pi.row(r).minCoeff() >= -1e-15);
  }
  // N_C never increases between collision states.
  for (int i = 0; i < static_cast<int>(chain.states.size()); ++i)
    for (int j = 0; j < static_cast<int>(chain.states.size()); ++j)
      if (chain.pi(i + 1, j + 1) > 0) CHECK(chain.states[j].colliding() <= chain.states[i].colliding());
  CHECK(chain.pi(chain.pi.rows() - 1, chain.pi.rows() - 1) == 1.0);
  CHECK_THROWS_AS(build_chain(30, 21, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(build_chain(8, 9, 0.5), std::invalid_argument);
}

TEST_CASE("spectral radius of small matrices") {
  Eigen::MatrixXd a(2, 2);
  a << 0.5, 0.25, 0.0, 0.3;
  CHECK(spectral_radius(a) == doctest::Approx(0.5).epsilon(1e-12));
  Eigen::MatrixXd b(2, 2);
  b << 0.0, 1.0, 1.0, 0.0;  // periodic: power iteration alone would not settle
  CHECK(spectral_radius(b) == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(3, 3);
  CHECK(spectral_radius(z) == 0.0);
}

TEST_CASE("subdominant eigenvalue closed form on small grids") {
  for (int length = 4; length <= 9; ++length)
    for (int stations = 2; stations <= std::min(length, 6); ++stations)
      for (double gamma : {0.1, 0.5, 0.9}) {
        const auto chain = build_chain(length, stations, gamma);
        const auto eig = second_eigenvalue(chain);
        CHECK(std::abs(eig.lambda - lambda_star_closed(length, stations, gamma)) <= 1e-9);
        CHECK(eig.argmax_colliding == 2);
      }
  CHECK(gamma_opt(16, 14) == doctest::Approx(0.25));
  CHECK(gamma_opt(16, 16) == doctest::Approx(0.5));
  CHECK(lambda_star_closed(16, 16, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("mean convergence: two stations by hand") {
  // Two stations, C slots: absorbed with prob (C-1)/C at the start; from the
  // pair state each schedule separates them with prob 1 - g^2 - (1-g)^2/(C-1).
  for (int length : {2, 3, 5})
    for (double g : {0.2, 0.5}) {
      const double stay = g * g + (1 - g) * (1 - g) / (length - 1);
      const double expected = 1.0 + (1.0 / length) / (1 - stay);
      CHECK(mean_convergence(build_chain(length, 2, g)) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("absorption times satisfy the first-step equations") {
  const auto chain = build_chain(9, 6, 0.35);
  const auto t = expected_absorption_times(chain);
  const auto q = chain.transient();
  const Eigen::VectorXd residual = t - q * t - Eigen::VectorXd::Ones(t.size());
  CHECK(residual.cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(t(0) == doctest::Approx(mean_convergence(chain)).epsilon(1e-12));
}

TEST_CASE("mean convergence agrees with the schedule kernel") {
  for (auto [length, stations, gamma] : {std::tuple{8, 6, 0.5}, std::tuple{10, 10, 0.3}}) {
    ProtocolParams p;
    p.gamma = gamma;
    const auto runs = replicate(20000, 5, [&](std::uint64_t s, int) {
      return static_cast<double>(
          schedule_convergence(ProtocolKind::Lzc, stations, length, p, s, 1'000'000, PhyParams{}).schedules);
    });
    const auto sum = summarize(runs);
    const double theory = mean_convergence(build_chain(length, stations, gamma)) - 1.0;
    CHECK(std::abs(sum.mean - theory) <= 4 * sum.std_error);
  }
}

TEST_CASE("learning bound constant") {
  const auto b = lmac_bound(0.5, 6, 4);
  const double k = std::pow(0.5 / 5, 4) * std::pow(0.25 / 5, 4);
  CHECK(b.k == doctest::Approx(k).epsilon(1e-14));
  CHECK(b.tail(0) == doctest::Approx(1.0));
  CHECK(b.tail(3) == doctest::Approx(std::pow(1 - k, 3)).epsilon(1e-14));
  CHECK_THROWS(lmac_bound(0.5, 1, 4));
}

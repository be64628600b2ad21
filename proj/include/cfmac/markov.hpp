#pragma once

// Absorbing Markov chain of L-ZC with a fixed schedule length C.
//
// A transient state records how the colliding stations are spread over the
// collision slots: a sorted multiset of occupancies, each >= 2. Stations in
// singly occupied slots never move again, and a colliding station either
// stays (probability gamma) or jumps to one of the n_I idle slots of the
// schedule it just saw. State order: IS, then blocks of decreasing N_C, then
// the absorbing collision-free state.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cfmac {

struct CollisionState {
  std::vector<int> parts;  // ascending, all >= 2

  int colliding() const;        // N_C
  int collision_slots() const;  // n_C
  int idle_slots(int length, int stations) const { return length - stations + colliding() - collision_slots(); }
  bool operator==(const CollisionState&) const = default;
  auto operator<=>(const CollisionState&) const = default;
};

/// Partitions of n into parts >= 2, each sorted ascending.
std::vector<CollisionState> partitions_at_least_two(int n);

/// All collision states for N stations, N_C from N down to 2.
std::vector<CollisionState> enumerate_states(int stations);

/// Number of orderings of the parts that give the same multiset.
double symmetry_count(const CollisionState& state);

/// Distribution of the next schedule from `from`. Key nullopt is absorption.
using NextStates = std::vector<std::pair<std::optional<CollisionState>, double>>;

/// Exact next-state distribution, enumerating every stay count per collision
/// slot and every occupancy vector of the idle slots by the movers.
NextStates transition_row_enumerated(const CollisionState& from, int length, int stations, double gamma);

/// Same distribution, aggregated with a bin-by-bin recursion over idle slots
/// (used for large N).
NextStates transition_row(const CollisionState& from, int length, int stations, double gamma);

/// P(from -> to) read off transition_row_enumerated. `to` nullopt = absorbed.
double transition_prob_exact(const CollisionState& from, const std::optional<CollisionState>& to, int length,
                             int stations, double gamma);

/// Closed sum for transitions within one N_C block: over the collision slots
/// that keep some of their stations and the injective maps of those onto
/// the target's slots, binomial stay terms, a multinomial for the movers and
/// the ordered choice of idle slots, divided by the target's symmetry count.
double transition_prob_formula(const CollisionState& from, const CollisionState& to, int length, int stations,
                               double gamma);

/// First-schedule distribution when all N stations pick uniformly among C.
/// Key nullopt is a collision-free first schedule.
NextStates initial_probs(int length, int stations);

struct ChainModel {
  int length = 0;
  int stations = 0;
  double gamma = 0.0;
  std::vector<CollisionState> states;  // transient collision states, chain order
  // Index ranges [begin, end) of each N_C block in `states`, N_C descending.
  std::vector<std::pair<int, int>> blocks;
  std::vector<int> block_colliding;
  // Full matrix: row/column 0 = IS, 1..S = states, S+1 = absorbing.
  Eigen::MatrixXd pi;

  int transient_count() const { return static_cast<int>(states.size()) + 1; }
  int index_of(const CollisionState& state) const;  // row/column in pi
  Eigen::MatrixXd transient() const { return pi.topLeftCorner(transient_count(), transient_count()); }
};

constexpr int kMaxChainStations = 20;

/// Chain with diagonal blocks from transition_prob_formula and the remaining
/// entries from the exact next-state distribution. Rejects N > 20 and N > C.
ChainModel build_chain(int length, int stations, double gamma);

struct BlockEigen {
  int colliding = 0;
  double value = 0.0;
};

struct EigenReport {
  double lambda = 0.0;  // largest over blocks
  int argmax_colliding = 0;
  std::vector<BlockEigen> blocks;
};

/// Spectral radius of a nonnegative square matrix: power iteration on A + I
/// with Collatz-Wielandt bounds, falling back to a dense eigensolve.
double spectral_radius(const Eigen::MatrixXd& a, double tol = 1e-13, int max_iter = 1'000'000);

/// Subdominant eigenvalue of the chain: max over N_C blocks of the block's
/// spectral radius. Zero when there are no collision states.
EigenReport second_eigenvalue(const ChainModel& chain);

/// gamma^2 + (1 - gamma)^2 / (C - N + 1).
double lambda_star_closed(int length, int stations, double gamma);

/// 1 / (C - N + 2).
double gamma_opt(int length, int stations);

/// Expected number of transient schedules starting from IS, counting the
/// IS step itself: [1,0..0] (I - Pi_T)^-1 1. Solved block by block.
double mean_convergence(const ChainModel& chain);

/// Expected schedules from each transient state (IS first).
Eigen::VectorXd expected_absorption_times(const ChainModel& chain);

struct LmacBound {
  double k = 0.0;
  /// Upper bound on P(tau >= 2n).
  double tail(int n) const;
};

/// K = ((1-beta)/(C-1))^N (beta(1-beta)/(C-1))^N.
LmacBound lmac_bound(double beta, int length, int stations);

}  // namespace cfmac

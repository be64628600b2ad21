#pragma once

// Schedule-level convergence kernels and the replication fan-out.
//
// The kernels simulate aligned, saturated, error-free networks one schedule
// at a time instead of one MAC slot at a time; they share the protocol rules
// with the slot engine and serve as its independent cross-check and as the
// fast path for large Monte Carlo batches (f-table builds, theory checks).
//
// replicate() runs replications with OpenMP; replicate_serial() is the
// reference used by the tests to pin the parallel path to identical output.

#include <cstdint>
#include <vector>

#include "cfmac/phy.hpp"
#include "cfmac/protocols.hpp"
#include "cfmac/rng.hpp"

namespace cfmac {

struct ConvergenceSample {
  // Schedules with at least one collision before the first collision-free
  // schedule; -1 when the cap was reached first.
  std::int64_t schedules = -1;
  // Medium time spent in those schedules.
  double seconds = 0.0;
  bool converged() const { return schedules >= 0; }
};

/// N stations start uniformly in a schedule of length C and update once per
/// schedule until all slots are distinct. Slot durations follow `phy`.
ConvergenceSample schedule_convergence(ProtocolKind kind, int stations, int length, const ProtocolParams& params,
                                       std::uint64_t seed, std::int64_t cap_schedules, const PhyParams& phy);

/// Same as schedule_convergence, but also returns the id sequence of
/// successful transmissions before convergence (ids 1..N, slot order).
ConvergenceSample schedule_convergence_with_successes(ProtocolKind kind, int stations, int length,
                                                      const ProtocolParams& params, std::uint64_t seed,
                                                      std::int64_t cap_schedules, const PhyParams& phy,
                                                      std::vector<int>& successes);

template <class Fn>
auto replicate_serial(int reps, std::uint64_t base_seed, Fn&& fn) {
  using Result = decltype(fn(std::uint64_t{}, int{}));
  std::vector<Result> out(reps);
  for (int r = 0; r < reps; ++r) out[r] = fn(replication_seed(base_seed, r), r);
  return out;
}

template <class Fn>
auto replicate(int reps, std::uint64_t base_seed, Fn&& fn) {
  using Result = decltype(fn(std::uint64_t{}, int{}));
  std::vector<Result> out(reps);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < reps; ++r) out[r] = fn(replication_seed(base_seed, r), r);
  return out;
}

}  // namespace cfmac

#pragma once

// Analytical throughput for a fixed schedule length C with N saturated
// stations, assuming the schedule has settled.

#include "cfmac/phy.hpp"

namespace cfmac {

struct SchedulePartition {
  double successes = 0.0;
  double collisions = 0.0;
  double idle = 0.0;
};

/// N <= C: every station owns a slot, C - N slots stay idle.
/// S = N E_p / (N T_S + (C - N) sigma).
double throughput_underloaded(int stations, int length, const PhyParams& phy);

/// N > C: expected number of collision slots when the N - C stations left
/// over after filling every slot land uniformly, C (1 - (1 - 1/C)^(N-C)).
double expected_collision_slots(int stations, int length);

/// Expected slot counts for the overloaded regime.
SchedulePartition overloaded_partition(int stations, int length);

/// S = C_suc E_p / (C_suc T_S + C_col T_C) with C_col from
/// expected_collision_slots.
double throughput_overloaded(int stations, int length, const PhyParams& phy);

}  // namespace cfmac

#include "cfmac/throughput_model.hpp"

#include <cmath>
#include <stdexcept>

namespace cfmac {

double throughput_underloaded(int stations, int length, const PhyParams& phy) {
  if (stations < 1 || length < 1) throw std::invalid_argument("throughput model needs N >= 1 and C >= 1");
  if (stations > length) throw std::invalid_argument("underloaded model needs N <= C");
  const double n = stations;
  return n * phy.payload_time_us() / (n * phy.success_duration_us(1) + (length - stations) * phy.sigma_us);
}

double expected_collision_slots(int stations, int length) {
  if (length < 1) throw std::invalid_argument("collision-slot model needs C >= 1");
  if (stations <= length) throw std::invalid_argument("collision-slot model needs N > C");
  const double c = length;
  return c * (1.0 - std::pow(1.0 - 1.0 / c, stations - length));
}

SchedulePartition overloaded_partition(int stations, int length) {
  SchedulePartition p;
  p.collisions = expected_collision_slots(stations, length);
  p.successes = length - p.collisions;
  p.idle = 0.0;
  return p;
}

double throughput_overloaded(int stations, int length, const PhyParams& phy) {
  const auto p = overloaded_partition(stations, length);
  return p.successes * phy.payload_time_us() /
         (p.successes * phy.success_duration_us(1) + p.collisions * phy.collision_duration_us());
}

}  // namespace cfmac

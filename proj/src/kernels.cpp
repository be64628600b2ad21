#include "cfmac/kernels.hpp"

#include <memory>
#include <stdexcept>

namespace cfmac {

namespace {

ConvergenceSample run_schedules(ProtocolKind kind, int stations, int length, const ProtocolParams& params,
                                std::uint64_t seed, std::int64_t cap, const PhyParams& phy,
                                std::vector<int>* successes) {
  if (stations < 1 || length < 1) throw std::invalid_argument("need at least one station and one slot");
  std::vector<Rng> rngs;
  std::vector<std::unique_ptr<ScheduleProtocol>> macs;
  rngs.reserve(stations);
  macs.reserve(stations);
  for (int j = 0; j < stations; ++j) {
    rngs.push_back(make_stream(seed, static_cast<std::uint64_t>(j + 1), StreamKind::Protocol));
    macs.push_back(init_protocol(kind, length, params, rngs.back()));
  }

  const double t_idle = phy.sigma_us;
  const double t_success = phy.success_duration_us(1);
  const double t_collision = phy.collision_duration_us();

  std::vector<int> occupancy(length + 1);
  std::vector<int> owner(length + 1);
  std::vector<int> idle;
  idle.reserve(length);
  ConvergenceSample sample;
  double elapsed_us = 0.0;
  for (std::int64_t n = 0; n < cap; ++n) {
    std::fill(occupancy.begin(), occupancy.end(), 0);
    for (int j = 0; j < stations; ++j) {
      const int s = macs[j]->current_slot();
      ++occupancy[s];
      owner[s] = j + 1;
    }
    int collided = 0, busy = 0;
    idle.clear();
    for (int s = 1; s <= length; ++s) {
      if (occupancy[s] == 0) {
        idle.push_back(s);
        elapsed_us += t_idle;
        continue;
      }
      ++busy;
      if (occupancy[s] >= 2) {
        ++collided;
        elapsed_us += t_collision;
      } else {
        elapsed_us += t_success;
        if (successes) successes->push_back(owner[s]);
      }
    }
    if (collided == 0) {
      // The clean schedule itself is not part of the convergence time.
      if (successes) successes->resize(successes->size() - busy);
      elapsed_us -= busy * t_success + (length - busy) * t_idle;
      sample.schedules = n;
      sample.seconds = elapsed_us * 1e-6;
      return sample;
    }
    for (int j = 0; j < stations; ++j) {
      const auto own = occupancy[macs[j]->current_slot()] == 1 ? Feedback::Success : Feedback::Failure;
      macs[j]->on_schedule_end(own, idle, rngs[j]);
    }
  }
  sample.seconds = elapsed_us * 1e-6;
  return sample;
}

}  // namespace

ConvergenceSample schedule_convergence(ProtocolKind kind, int stations, int length, const ProtocolParams& params,
                                       std::uint64_t seed, std::int64_t cap_schedules, const PhyParams& phy) {
  return run_schedules(kind, stations, length, params, seed, cap_schedules, phy, nullptr);
}

ConvergenceSample schedule_convergence_with_successes(ProtocolKind kind, int stations, int length,
                                                      const ProtocolParams& params, std::uint64_t seed,
                                                      std::int64_t cap_schedules, const PhyParams& phy,
                                                      std::vector<int>& successes) {
  successes.clear();
  return run_schedules(kind, stations, length, params, seed, cap_schedules, phy, &successes);
}

}  // namespace cfmac

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cfmac/engine.hpp"
#include "cfmac/phy.hpp"
#include "cfmac/trace.hpp"

namespace cfmac {

struct ConvergenceResult {
  // Index of the first collision-free schedule (= schedules before it).
  std::int64_t schedules = -1;
  // Medium time before that schedule starts.
  double seconds = 0.0;
  bool converged() const { return schedules >= 0; }
};

/// Scans schedule-aligned windows of `length` slots from the start of the
/// trace for the first one in which all `stations` transmit successfully.
/// Meant for fixed-length, error-free, saturated runs that start together.
ConvergenceResult detect_convergence(const Trace& trace, int stations, int length);

/// Same question answered from the event log: the first schedule index in
/// which every station's chosen slot is distinct.
ConvergenceResult detect_convergence_events(const EventLog& events, int stations);

/// Online version of detect_convergence for long runs without a trace.
class AlignedConvergenceDetector {
 public:
  AlignedConvergenceDetector(int stations, int length, std::uint64_t first_slot = 0, double start_us = 0.0);

  /// Feed the slot with the given index and start time. Returns true once the
  /// first clean schedule is complete.
  bool feed(const SlotOutcome& outcome, std::uint64_t slot_index, double slot_start_us);
  bool converged() const { return result_.converged(); }
  const ConvergenceResult& result() const { return result_; }
  std::int64_t schedules_seen() const { return schedule_; }
  const std::vector<int>& successes_before() const { return successes_; }
  void keep_successes(bool on) { keep_successes_ = on; }

 private:
  int stations_;
  int length_;
  std::uint64_t first_slot_;
  double start_us_;
  std::int64_t schedule_ = 0;
  double schedule_start_us_ = 0.0;
  int clean_successes_ = 0;
  bool dirty_ = false;
  bool keep_successes_ = false;
  std::vector<int> successes_;
  std::size_t successes_at_schedule_start_ = 0;
  ConvergenceResult result_;
};

/// Jain's index averaged over non-overlapping windows of w = m*N successes.
/// Empty when the sequence is shorter than one window.
std::optional<double> jain_index(std::span<const int> sequence, int stations, int m);

/// Share of transmission attempts that ended in a collision. Errored frames
/// count as attempts but not as collisions. Empty without attempts.
std::optional<double> collision_rate(const Trace& trace);

struct Throughput {
  double normalised = 0.0;
  double mbps = 0.0;
};

/// Delivered payload bits over elapsed medium time.
Throughput throughput(const Trace& trace, const PhyParams& phy);
Throughput throughput(std::uint64_t delivered_packets, double elapsed_us, const PhyParams& phy);

/// Mean head-of-queue to completion time over delivered packets.
std::optional<double> access_delay(const StationStats& stats);
std::optional<double> access_delay(std::span<const StationStats> stats);

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double ci_half_width = 0.0;  // 1.96 * std_error
};

Summary summarize(std::span<const double> values);

struct RunMetrics {
  std::int64_t kappa_schedules = -1;
  double conv_seconds = -1.0;
  double thr_norm = 0.0;
  double thr_mbps = 0.0;
  std::optional<double> coll_rate;
  std::optional<double> mean_delay_us;
  std::vector<std::optional<double>> jain;  // m = 1..10
  std::vector<double> per_station_pps;
};

struct AchievableRateOptions {
  double lambda_high_pps = 0.0;  // 0: derive from the saturated throughput
  double tolerance_pps = 1.0;
  double horizon_seconds = 20.0;
  int max_retries = 2;
  std::uint64_t seed = 1;
};

struct AchievableRate {
  double lambda_pps = 0.0;
  double max_rho_at_lambda = 0.0;
  double horizon_seconds = 0.0;
  bool monotone = true;
};

/// max_i rho_i for Poisson arrivals at `lambda_pps` per station, with
/// rho_i = mean service time / mean inter-arrival time.
double estimate_max_rho(const NetworkConfig& config, std::span<const StationSpec> stations, double lambda_pps,
                        double horizon_seconds, std::uint64_t seed);

/// Largest per-station arrival rate with max_i rho_i < 1, by bisection.
AchievableRate achievable_rate(const NetworkConfig& config, std::span<const StationSpec> stations,
                               const AchievableRateOptions& options);

}  // namespace cfmac

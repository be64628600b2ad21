#pragma once

// Experiment orchestration: replications, aggregation and CSV output.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cfmac/config.hpp"
#include "cfmac/metrics.hpp"

namespace cfmac {

/// One slot-level run of `stations` protocol stations plus `dcf_stations`
/// DCF stations over the configured horizon. Convergence and Jain's index
/// are filled only for fixed-length, error-free, saturated runs without DCF.
RunMetrics simulate(const SimConfig& config, int stations, int dcf_stations, std::uint64_t seed);

/// Schedule-level convergence run (see kernels.hpp) with the pre-convergence
/// Jain's index for m = 1..10.
RunMetrics converge_once(const SimConfig& config, std::uint64_t seed);

struct ReentryResult {
  double initial_seconds = -1.0;      // time for the first `stations` to converge
  double reconvergence_seconds = -1.0;  // from the join to the end of the last collision
  bool converged() const { return reconvergence_seconds >= 0.0; }
};

/// `stations` start together and converge; `join_stations` more join at once
/// (at join_time, or as soon as the first group has converged). Absorption
/// is declared once 2C consecutive slots pass without a collision.
ReentryResult new_entrants_once(const SimConfig& config, std::uint64_t seed);

struct CoexistResult {
  double aggregate_norm = 0.0;
  double dcf_norm = 0.0;
  double baseline_norm = 0.0;  // same number of stations, all DCF
};

CoexistResult coexist_once(const SimConfig& config, int k, std::uint64_t seed);

/// Header and row of the per-run metrics CSV.
void write_metrics_header(std::ostream& os);
void write_metrics_row(std::ostream& os, const SimConfig& config, int stations, std::uint64_t seed,
                       std::uint64_t hash, const RunMetrics& m);

struct ScenarioOutput {
  std::vector<std::filesystem::path> files;
};

std::vector<std::string_view> scenario_kinds();

/// Run a scenario, writing `<kind>_runs.csv` (one row per replication) and
/// `<kind>.csv` (means and 95% intervals per sweep point) into `out_dir`.
ScenarioOutput run_scenario(std::string_view kind, const SimConfig& config, const std::filesystem::path& out_dir);

struct ReproduceOptions {
  std::uint64_t seed = 1;
  int replications = 20;        // slot-level runs per point
  int kernel_replications = 1000;  // schedule-level runs per point
  double horizon_seconds = 20.0;
  std::filesystem::path ftable;  // built (small) when empty
};

struct ReproduceReport {
  std::vector<std::filesystem::path> written;
  std::vector<std::pair<std::string, std::string>> failed;  // name, reason
};

/// Data behind every figure of the evaluation, one CSV per figure.
ReproduceReport reproduce_all(const std::filesystem::path& out_dir, const ReproduceOptions& options);

}  // namespace cfmac

#pragma once

// Flat key = value experiment description.
//
//   # comment
//   protocol = lmac          dcf | lbeb | zc | lzc | lmac
//   adaptation = none        none | ap | alzc (alias azc) | almac
//   stations = 16            N (stations running `protocol`)
//   dcf_stations = 0         extra DCF stations sharing the channel
//   length = 16              C for fixed schedules, B for adaptive ones
//   max_length = 16384
//   ap_initial_length = 16
//   beta = 0.95
//   gamma = auto             auto = 1/(C-N+2) when N <= C, else 0.5
//   traffic = saturated      saturated | poisson
//   arrival_rate = 0         packets/s per station (poisson)
//   arrival_mbps = 0         alternative to arrival_rate
//   queue_capacity = 50
//   error_rate = 0
//   horizon = 10             amount of horizon_unit
//   horizon_unit = seconds   seconds | slots
//   cap_schedules = 1000000
//   replications = 100
//   seed = 1
//   join_stations = 0        stations added once the network has converged
//   join_time = 0            seconds; 0 = at convergence
//   sweep = none             none | beta | gamma | stations | error_rate
//   sweep_values =           comma separated
//   ftable =                 CSV produced by `cfmac ftable`
//   payload_bytes = 1000  data_rate = 11e6  basic_rate = 11e6
//   phy_header_bytes = 24  mac_header_bytes = 32  sifs = 10  difs = 50  sigma = 20

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfmac/adaptation.hpp"
#include "cfmac/engine.hpp"
#include "cfmac/phy.hpp"
#include "cfmac/protocols.hpp"

namespace cfmac {

enum class SweepKind { None, Beta, Gamma, Stations, ErrorRate };

std::string_view to_string(SweepKind kind);

struct SimConfig {
  ProtocolKind protocol = ProtocolKind::Lmac;
  AdaptationKind adaptation = AdaptationKind::None;
  int stations = 16;
  int dcf_stations = 0;
  int length = 16;
  int max_length = 16 * 1024;
  int ap_initial_length = 16;
  double beta = 0.95;
  std::optional<double> gamma;  // nullopt = auto
  TrafficModel::Mode traffic = TrafficModel::Mode::Saturated;
  double arrival_rate_pps = 0.0;
  int queue_capacity = 50;
  double error_rate = 0.0;
  double horizon = 10.0;
  Horizon::Unit horizon_unit = Horizon::Unit::Seconds;
  std::int64_t cap_schedules = 1'000'000;
  int replications = 100;
  std::uint64_t seed = 1;
  int join_stations = 0;
  double join_time_s = 0.0;
  SweepKind sweep = SweepKind::None;
  std::vector<double> sweep_values;
  std::string ftable_path;
  PhyParams phy = experiment_phy();

  /// Experiments send 1000-byte payloads; the analytical model keeps 1020.
  static PhyParams experiment_phy();

  /// gamma in effect for L-ZC with the configured N and C.
  double effective_gamma() const;
  ProtocolParams protocol_params() const;
};

struct Diagnostic {
  int line = 0;
  std::string key;
  std::string value;
  std::string constraint;
};

std::string to_string(const Diagnostic& d);

struct ConfigResult {
  std::optional<SimConfig> config;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return config.has_value() && diagnostics.empty(); }
};

/// Parse and check a config text. Unknown keys, malformed values and values
/// outside their range are reported; nothing is returned unless all pass.
ConfigResult validate_config(std::string_view text);

/// Range checks on an already-built config (also run by validate_config).
std::vector<Diagnostic> check_config(const SimConfig& config);

/// Canonical key = value form; parses back to the same config.
std::string to_text(const SimConfig& config);

/// FNV-1a of to_text().
std::uint64_t config_hash(const SimConfig& config);

NetworkConfig network_config(const SimConfig& config);

/// Station specs: `stations` running the protocol, then the DCF stations.
std::vector<StationSpec> population(const SimConfig& config, int stations, int dcf_stations);

}  // namespace cfmac

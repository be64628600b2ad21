#pragma once

// Slot-level network simulator.
//
// Time advances one MAC slot per step(). A slot is idle, a success, a
// collision, or a channel-errored frame; its duration follows PhyParams.
// Schedule-based stations track their position within their own schedule
// (phase origin = the slot they joined) and transmit when that position
// equals their chosen slot, which is the same as running the backoff counter
// C - s(n) + s(n+1) between transmissions. Slot choices and schedule-length
// changes are made at each station's schedule boundary, from a complete
// observation window. DCF stations run an explicit backoff counter.

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cfmac/adaptation.hpp"
#include "cfmac/observation.hpp"
#include "cfmac/phy.hpp"
#include "cfmac/protocols.hpp"
#include "cfmac/rng.hpp"
#include "cfmac/trace.hpp"

namespace cfmac {

struct TrafficModel {
  enum class Mode { Saturated, Poisson };
  Mode mode = Mode::Saturated;
  double arrival_rate_pps = 0.0;  // per station
  int queue_capacity = 50;
};

struct ChannelModel {
  double frame_error_rate = 0.0;
};

struct StationSpec {
  ProtocolKind protocol = ProtocolKind::Lmac;
  AdaptationKind adaptation = AdaptationKind::None;
  ProtocolParams params;
  // Fixed schedule length; adaptive stations start at the base length and
  // AP-controlled ones at the currently announced length.
  int schedule_length = 16;
};

struct NetworkConfig {
  PhyParams phy;
  TrafficModel traffic;
  ChannelModel channel;
  int base_length = 16;
  int max_length = 16 * 1024;
  int ap_initial_length = 16;
  int probe_every = 10;
  std::shared_ptr<const FTable> ftable;
  bool record_trace = false;
  bool record_events = false;
};

struct StationStats {
  std::uint64_t attempts = 0;
  std::uint64_t successful_slots = 0;
  std::uint64_t delivered_packets = 0;
  std::uint64_t failed_attempts = 0;
  std::uint64_t retry_drops = 0;
  std::uint64_t queue_drops = 0;
  std::uint64_t arrivals = 0;
  double delay_sum_us = 0.0;  // head-of-queue to completion, delivered packets
  std::uint64_t delay_count = 0;
};

struct StationHandle {
  int id = 0;
  StationSpec spec;
  std::uint64_t join_slot = 0;
  double join_time_us = 0.0;
  Rng mac_rng;
  Rng traffic_rng;

  // Traffic. Saturated stations leave the queue empty and always have a packet.
  std::deque<double> queue;  // arrival times
  double next_arrival_us = 0.0;
  double hol_since_us = 0.0;

  // DCF.
  DcfState dcf;
  int counter = 0;

  // Schedule-based protocols.
  std::unique_ptr<ScheduleProtocol> protocol;
  ObservationWindow window;
  int position = 1;  // relative position of the next slot, 1..length
  Feedback own = Feedback::Success;
  std::uint64_t schedule_index = 0;
  std::optional<AlzcAdapter> alzc;
  std::optional<AlmacAdapter> almac;
  std::unique_ptr<ScheduleProtocol> pre_probe;

  StationStats stats;

  bool saturated = true;
  bool has_packet() const { return saturated || !queue.empty(); }
  int schedule_length() const { return protocol ? protocol->schedule_length() : 0; }
  /// MAC slots until this station's next transmission opportunity, assuming
  /// a schedule-based station keeps its current slot.
  int backoff_counter() const;
  /// Packets sent per access (TXOP count for adaptive stations).
  int packets_per_access(int base_length) const;
};

class Network {
 public:
  Network(NetworkConfig config, std::uint64_t seed);

  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  /// Adds a station that joins at the current slot. Returns its id (1-based).
  int add_station(const StationSpec& spec);

  /// Advance one MAC slot.
  const SlotOutcome& step();

  std::uint64_t slot_index() const { return slot_index_; }
  double now_us() const { return now_us_; }
  const SlotOutcome& last() const { return last_; }
  const NetworkConfig& config() const { return config_; }
  std::span<const StationHandle> stations() const { return stations_; }
  const StationHandle& station(int id) const { return stations_.at(id - 1); }
  std::optional<int> announced_length() const;

  const Trace& trace() const { return trace_; }
  const EventLog& events() const { return events_; }
  Trace take_trace() { return std::move(trace_); }
  EventLog take_events() { return std::move(events_); }

 private:
  void deliver_arrivals(StationHandle& st);
  void complete_packets(StationHandle& st, unsigned packets, double done_us);
  void drop_head(StationHandle& st, double now_us);
  void end_schedule(StationHandle& st);
  void apply_length(StationHandle& st, int new_length);
  void ap_observe(bool busy);

  NetworkConfig config_;
  std::uint64_t seed_;
  Rng channel_rng_;
  std::vector<StationHandle> stations_;
  std::uint64_t slot_index_ = 0;
  double now_us_ = 0.0;
  SlotOutcome last_;
  std::vector<int> idle_scratch_;
  std::vector<std::uint8_t> at_slot_;

  struct ApState {
    int length = 16;
    int position = 1;
    ObservationWindow window;
  };
  std::optional<ApState> ap_;

  Trace trace_;
  EventLog events_;
};

struct Horizon {
  enum class Unit { Slots, Seconds };
  Unit unit = Unit::Slots;
  double amount = 0.0;
};

struct RunRecord {
  Trace trace;
  EventLog events;
  double elapsed_us = 0.0;
  std::vector<StationStats> stats;
};

/// Validate a population before it is simulated; throws std::invalid_argument.
void validate_population(const NetworkConfig& config, std::span<const StationSpec> stations);

/// Run a population that joins together at slot 0 for the given horizon,
/// recording the trace and event log.
RunRecord run(NetworkConfig config, std::span<const StationSpec> stations, Horizon horizon, std::uint64_t seed);

}  // namespace cfmac

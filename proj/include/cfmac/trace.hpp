#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cfmac/phy.hpp"
#include "cfmac/protocols.hpp"

namespace cfmac {

/// What happened in one MAC slot. Collision carries >= 2 transmitters;
/// Success and Error exactly one; Idle none.
struct SlotOutcome {
  SlotKind kind = SlotKind::Idle;
  std::vector<int> transmitters;
  unsigned packets = 0;  // packets delivered (Success only)
  double duration_us = 0.0;
};

struct TraceRow {
  std::uint64_t slot_index = 0;
  double start_us = 0.0;
  SlotOutcome outcome;
};

struct EventRow {
  int station = 0;
  std::uint64_t schedule_index = 0;
  int chosen_slot = 0;  // schedule-based: slot used in the schedule; DCF: counter drawn
  Feedback outcome = Feedback::Success;
  int schedule_length = 0;
};

using Trace = std::vector<TraceRow>;
using EventLog = std::vector<EventRow>;

/// slot_index,sim_time_us,kind,transmitters,duration_us
/// (transmitters separated by ';'; sim_time_us is the slot start time).
void write_trace_csv(std::ostream& os, const Trace& trace);
Trace read_trace_csv(std::istream& is);

/// station,schedule_index,chosen_slot,outcome
void write_events_csv(std::ostream& os, const EventLog& events);

}  // namespace cfmac

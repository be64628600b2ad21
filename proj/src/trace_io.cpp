#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cfmac/trace.hpp"

namespace cfmac {

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "slot_index,sim_time_us,kind,transmitters,duration_us\n";
  os << std::setprecision(17);
  for (const auto& row : trace) {
    os << row.slot_index << ',' << row.start_us << ',' << to_string(row.outcome.kind) << ',';
    for (std::size_t i = 0; i < row.outcome.transmitters.size(); ++i)
      os << (i ? ";" : "") << row.outcome.transmitters[i];
    os << ',' << row.outcome.duration_us << '\n';
  }
}

namespace {
SlotKind parse_kind(const std::string& s) {
  for (auto k : {SlotKind::Idle, SlotKind::Success, SlotKind::Collision, SlotKind::Error})
    if (s == to_string(k)) return k;
  throw std::runtime_error("trace CSV: unknown slot kind '" + s + "'");
}
}  // namespace

Trace read_trace_csv(std::istream& is) {
  Trace trace;
  std::string line;
  if (!std::getline(is, line) || line.rfind("slot_index", 0) != 0) throw std::runtime_error("trace CSV: missing header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string idx, start, kind, tx, dur;
    std::getline(fields, idx, ',');
    std::getline(fields, start, ',');
    std::getline(fields, kind, ',');
    std::getline(fields, tx, ',');
    std::getline(fields, dur, ',');
    TraceRow row;
    row.slot_index = std::stoull(idx);
    row.start_us = std::stod(start);
    row.outcome.kind = parse_kind(kind);
    std::istringstream ids(tx);
    for (std::string id; std::getline(ids, id, ';');)
      if (!id.empty()) row.outcome.transmitters.push_back(std::stoi(id));
    row.outcome.duration_us = std::stod(dur);
    trace.push_back(std::move(row));
  }
  return trace;
}

void write_events_csv(std::ostream& os, const EventLog& events) {
  os << "station,schedule_index,chosen_slot,outcome\n";
  for (const auto& e : events)
    os << e.station << ',' << e.schedule_index << ',' << e.chosen_slot << ','
       << (e.outcome == Feedback::Success ? "success" : "failure") << '\n';
}

}  // namespace cfmac

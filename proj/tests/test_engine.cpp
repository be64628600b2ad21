#include "doctest.h"

#include <sstream>
#include <stdexcept>

#include "cfmac/engine.hpp"
#include "cfmac/metrics.hpp"

using namespace cfmac;

namespace {

StationSpec spec(ProtocolKind kind, int length) {
  StationSpec s;
  s.protocol = kind;
  s.schedule_length = length;
  s.params.gamma = 0.5;
  return s;
}

std::vector<StationSpec> many(int n, ProtocolKind kind, int length) { return std::vector<StationSpec>(n, spec(kind, length)); }

Horizon slots(double n) { return {Horizon::Unit::Slots, n}; }

}  // namespace

TEST_CASE("two stations on a one-slot schedule collide") {
  NetworkConfig cfg;
  const auto rec = run(cfg, many(2, ProtocolKind::Lzc, 1), slots(1), 1);
  REQUIRE(rec.trace.size() == 1);
  CHECK(rec.trace[0].outcome.kind == SlotKind::Collision);
  CHECK(rec.trace[0].outcome.transmitters == std::vector<int>{1, 2});
  CHECK(rec.trace[0].outcome.duration_us == doctest::Approx(cfg.phy.collision_duration_us()));
}

TEST_CASE("a lone transmitter succeeds in one slot of 896 us") {
  NetworkConfig cfg;
  const auto rec = run(cfg, many(1, ProtocolKind::Lmac, 1), slots(3), 1);
  for (const auto& row : rec.trace) {
    CHECK(row.outcome.kind == SlotKind::Success);
    CHECK(row.outcome.packets == 1);
    CHECK(row.outcome.duration_us == doctest::Approx(896.0).epsilon(1e-12));
  }
}

TEST_CASE("no arrivals means every slot is idle") {
  NetworkConfig cfg;
  cfg.traffic.mode = TrafficModel::Mode::Poisson;
  cfg.traffic.arrival_rate_pps = 0.0;
  const auto rec = run(cfg, many(4, ProtocolKind::Lzc, 8), slots(500), 3);
  for (const auto& row : rec.trace) {
    CHECK(row.outcome.kind == SlotKind::Idle);
    CHECK(row.outcome.duration_us == 20.0);
  }
}

TEST_CASE("observation window bookkeeping") {
  ObservationWindow w(4);
  w.record(1, false);
  w.record(2, true);
  w.record(3, true);
  w.record(4, false);
  CHECK(w.idle_positions() == std::vector<int>{1, 4});
  CHECK(w.idle_count() == 2);
  CHECK(w.busy_count() == 2);
  for (int j = 1; j <= 4; ++j) w.record(j, true);
  CHECK(w.idle_positions().empty());
  w.rebuild(8);
  CHECK(w.length() == 8);
  CHECK(w.busy_count() == 0);
}

TEST_CASE("one station never collides") {
  NetworkConfig cfg;
  for (auto kind : {ProtocolKind::Dcf, ProtocolKind::Lbeb, ProtocolKind::Zc, ProtocolKind::Lzc, ProtocolKind::Lmac}) {
    const auto rec = run(cfg, many(1, kind, 16), slots(100), 9);
    CHECK(rec.trace.size() == 100);
    for (const auto& row : rec.trace) CHECK(row.outcome.kind != SlotKind::Collision);
  }
}

TEST_CASE("same seed gives the same trace") {
  NetworkConfig cfg;
  cfg.channel.frame_error_rate = 0.05;
  for (auto kind : {ProtocolKind::Dcf, ProtocolKind::Lzc, ProtocolKind::Lmac}) {
    const auto a = run(cfg, many(10, kind, 16), slots(5000), 77);
    const auto b = run(cfg, many(10, kind, 16), slots(5000), 77);
    std::ostringstream x, y;
    write_trace_csv(x, a.trace);
    write_trace_csv(y, b.trace);
    CHECK(x.str() == y.str());
  }
}

TEST_CASE("attempts, durations and clock are conserved") {
  NetworkConfig cfg;
  cfg.channel.frame_error_rate = 0.1;
  auto pop = many(6, ProtocolKind::Lmac, 8);
  for (int i = 0; i < 3; ++i) pop.push_back(spec(ProtocolKind::Dcf, 8));
  const auto rec = run(cfg, pop, slots(20000), 5);
  std::uint64_t attempts = 0, from_trace = 0;
  double clock = 0.0;
  for (const auto& s : rec.stats) attempts += s.attempts;
  for (const auto& row : rec.trace) {
    CHECK(row.start_us == clock);
    clock += row.outcome.duration_us;
    if (row.outcome.kind == SlotKind::Success || row.outcome.kind == SlotKind::Error) {
      CHECK(row.outcome.transmitters.size() == 1);
      ++from_trace;
    } else if (row.outcome.kind == SlotKind::Collision) {
      CHECK(row.outcome.transmitters.size() >= 2);
      from_trace += row.outcome.transmitters.size();
    }
    CHECK(row.outcome.duration_us == slot_duration(row.outcome.kind, cfg.phy, std::max(1u, row.outcome.packets)));
  }
  CHECK(attempts == from_trace);
  CHECK(clock == rec.elapsed_us);
}

TEST_CASE("collision-free schedules are absorbing") {
  NetworkConfig cfg;
  for (auto kind : {ProtocolKind::Lbeb, ProtocolKind::Zc, ProtocolKind::Lzc, ProtocolKind::Lmac}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto rec = run(cfg, many(8, kind, 12), slots(12 * 3000), seed);
      const auto conv = detect_convergence(rec.trace, 8, 12);
      REQUIRE(conv.converged());
      const std::size_t start = static_cast<std::size_t>(conv.schedules) * 12;
      for (std::size_t i = start; i < rec.trace.size(); ++i) REQUIRE(rec.trace[i].outcome.kind != SlotKind::Collision);
    }
  }
}

TEST_CASE("channel errors at rate zero change nothing") {
  NetworkConfig clean, zero;
  zero.channel.frame_error_rate = 0.0;
  const auto a = run(clean, many(8, ProtocolKind::Lmac, 16), slots(3000), 4);
  const auto b = run(zero, many(8, ProtocolKind::Lmac, 16), slots(3000), 4);
  CHECK(a.elapsed_us == b.elapsed_us);
  CHECK(a.trace.size() == b.trace.size());
}

TEST_CASE("error slots are busy, last T_C and fail the sender") {
  NetworkConfig cfg;
  cfg.channel.frame_error_rate = 1.0;
  const auto rec = run(cfg, many(1, ProtocolKind::Lmac, 1), slots(10), 1);
  for (const auto& row : rec.trace) {
    CHECK(row.outcome.kind == SlotKind::Error);
    CHECK(row.outcome.duration_us == doctest::Approx(cfg.phy.collision_duration_us()));
  }
  CHECK(rec.stats[0].delivered_packets == 0);
  CHECK(rec.stats[0].failed_attempts == 10);
}

TEST_CASE("adding a station does not change other stations' draws") {
  NetworkConfig cfg;
  cfg.record_events = true;
  Network a(cfg, 12), b(cfg, 12);
  for (int i = 0; i < 4; ++i) {
    a.add_station(spec(ProtocolKind::Lmac, 16));
    b.add_station(spec(ProtocolKind::Lmac, 16));
  }
  b.add_station(spec(ProtocolKind::Lmac, 16));
  // The first schedule's slot choices come from each station's own stream.
  for (int id = 1; id <= 4; ++id) CHECK(a.station(id).protocol->current_slot() == b.station(id).protocol->current_slot());
}

TEST_CASE("queues never exceed capacity") {
  NetworkConfig cfg;
  cfg.traffic.mode = TrafficModel::Mode::Poisson;
  cfg.traffic.arrival_rate_pps = 5000.0;
  cfg.traffic.queue_capacity = 50;
  Network net(cfg, 2);
  for (int i = 0; i < 10; ++i) net.add_station(spec(ProtocolKind::Lzc, 16));
  for (int i = 0; i < 20000; ++i) {
    net.step();
    for (const auto& st : net.stations()) REQUIRE(st.queue.size() <= 50);
  }
  std::uint64_t drops = 0;
  for (const auto& st : net.stations()) drops += st.stats.queue_drops;
  CHECK(drops > 0);
}

TEST_CASE("trace csv round trip") {
  NetworkConfig cfg;
  cfg.channel.frame_error_rate = 0.2;
  const auto rec = run(cfg, many(5, ProtocolKind::Lzc, 4), slots(300), 8);
  std::stringstream ss;
  write_trace_csv(ss, rec.trace);
  const auto back = read_trace_csv(ss);
  REQUIRE(back.size() == rec.trace.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].slot_index == rec.trace[i].slot_index);
    CHECK(back[i].outcome.kind == rec.trace[i].outcome.kind);
    CHECK(back[i].outcome.transmitters == rec.trace[i].outcome.transmitters);
    CHECK(back[i].outcome.duration_us == doctest::Approx(rec.trace[i].outcome.duration_us).epsilon(1e-12));
  }
}

TEST_CASE("invalid populations are rejected") {
  NetworkConfig cfg;
  CHECK_THROWS_AS(validate_population(cfg, many(0, ProtocolKind::Lmac, 16)), std::invalid_argument);
  CHECK_THROWS_AS(validate_population(cfg, many(2, ProtocolKind::Lmac, 0)), std::invalid_argument);
  auto bad = spec(ProtocolKind::Lmac, 16);
  bad.params.beta = 1.5;
  CHECK_THROWS_AS(validate_population(cfg, std::vector<StationSpec>{bad}), std::invalid_argument);
  bad = spec(ProtocolKind::Lzc, 16);
  bad.params.gamma = 0.0;
  CHECK_THROWS_AS(validate_population(cfg, std::vector<StationSpec>{bad}), std::invalid_argument);
}

#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "cfmac/config.hpp"
#include "cfmac/engine.hpp"
#include "cfmac/metrics.hpp"

using namespace cfmac;

namespace {

TraceRow row(std::uint64_t i, SlotKind kind, std::vector<int> tx = {}, unsigned packets = 0) {
  TraceRow r;
  r.slot_index = i;
  r.start_us = 0;
  r.outcome.kind = kind;
  r.outcome.transmitters = std::move(tx);
  r.outcome.packets = packets;
  r.outcome.duration_us = slot_duration(kind, PhyParams{}, std::max(1u, packets));
  return r;
}

// Jain's index straight from its definition over each window.
double jain_direct(const std::vector<int>& seq, int n, int m) {
  const std::size_t w = static_cast<std::size_t>(n) * m;
  double total = 0;
  std::size_t windows = seq.size() / w;
  for (std::size_t k = 0; k < windows; ++k) {
    std::vector<double> x(n, 0.0);
    for (std::size_t j = k * w; j < (k + 1) * w; ++j) x[seq[j] - 1] += 1;
    double s = 0, s2 = 0;
    for (double v : x) {
      s += v;
      s2 += v * v;
    }
    total += s * s / (n * s2);
  }
  return total / windows;
}

}  // namespace

TEST_CASE("jain index") {
  CHECK(*jain_index(std::vector<int>{1, 2, 3, 4}, 4, 1) == doctest::Approx(1.0));
  CHECK(*jain_index(std::vector<int>{1, 1, 1, 1}, 4, 1) == doctest::Approx(0.25));
  CHECK_FALSE(jain_index(std::vector<int>{1, 2, 3}, 4, 1).has_value());
  // Trailing partial window is ignored.
  CHECK(*jain_index(std::vector<int>{1, 2, 1, 1, 1}, 2, 1) == doctest::Approx((1.0 + 0.5) / 2));
  Rng rng(1);
  std::vector<int> seq(997);
  for (auto& s : seq) s = uniform_int(rng, 1, 5);
  for (int m = 1; m <= 10; ++m) CHECK(*jain_index(seq, 5, m) == doctest::Approx(jain_direct(seq, 5, m)).epsilon(1e-12));
  CHECK_THROWS(jain_index(std::vector<int>{0, 1}, 2, 1));
}

TEST_CASE("collision rate counts errors as attempts") {
  Trace t{row(0, SlotKind::Success, {1}, 1), row(1, SlotKind::Collision, {2, 3}), row(2, SlotKind::Idle),
          row(3, SlotKind::Error, {4})};
  CHECK(*collision_rate(t) == doctest::Approx(2.0 / 4));
  CHECK_FALSE(collision_rate(Trace{row(0, SlotKind::Idle)}).has_value());
}

TEST_CASE("throughput from counts and traces") {
  const PhyParams phy;
  const auto t = throughput(10, 10 * 896.0, phy);
  CHECK(t.normalised == doctest::Approx(8160.0 / 11.0 / 896.0).epsilon(1e-12));
  CHECK(t.mbps == doctest::Approx(8160.0 / 896.0).epsilon(1e-12));
  CHECK_THROWS(throughput(1, 0.0, phy));

  Trace tr{row(0, SlotKind::Success, {1}, 2), row(1, SlotKind::Idle), row(2, SlotKind::Success, {2}, 1)};
  const double elapsed = phy.success_duration_us(2) + 20 + phy.success_duration_us(1);
  CHECK(throughput(tr, phy).normalised == doctest::Approx(throughput(3, elapsed, phy).normalised).epsilon(1e-12));
  // Packet counts recovered from durations when absent.
  for (auto& r : tr) r.outcome.packets = 0;
  CHECK(throughput(tr, phy).normalised == doctest::Approx(throughput(3, elapsed, phy).normalised).epsilon(1e-12));
}

TEST_CASE("summary statistics") {
  const std::vector<double> v{1, 2, 3, 4};
  const auto s = summarize(v);
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(s.ci_half_width == doctest::Approx(1.96 * s.std_error));
  CHECK(summarize(std::vector<double>{}).n == 0);
}

TEST_CASE("aligned convergence detector") {
  // N = 2, C = 3: a dirty schedule, then a clean one.
  Trace t{row(0, SlotKind::Collision, {1, 2}), row(1, SlotKind::Idle), row(2, SlotKind::Idle),
          row(3, SlotKind::Success, {1}, 1), row(4, SlotKind::Idle), row(5, SlotKind::Success, {2}, 1)};
  double clock = 0;
  for (auto& r : t) {
    r.start_us = clock;
    clock += r.outcome.duration_us;
  }
  const auto c = detect_convergence(t, 2, 3);
  CHECK(c.schedules == 1);
  CHECK(c.seconds == doctest::Approx((t[0].outcome.duration_us + 40) * 1e-6));
  CHECK_FALSE(detect_convergence(Trace{t.begin(), t.begin() + 3}, 2, 3).converged());
  // An error in an otherwise clean schedule blocks it.
  t[4] = row(4, SlotKind::Error, {1});
  CHECK_FALSE(detect_convergence(t, 2, 3).converged());
}

TEST_CASE("trace and event detectors agree on engine runs") {
  NetworkConfig cfg;
  cfg.record_events = true;
  for (auto kind : {ProtocolKind::Lbeb, ProtocolKind::Zc, ProtocolKind::Lzc, ProtocolKind::Lmac})
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      StationSpec s;
      s.protocol = kind;
      s.schedule_length = 10;
      const auto rec = run(cfg, std::vector<StationSpec>(8, s), {Horizon::Unit::Slots, 10 * 2000}, seed);
      const auto a = detect_convergence(rec.trace, 8, 10);
      const auto b = detect_convergence_events(rec.events, 8);
      REQUIRE(a.converged());
      CHECK(a.schedules == b.schedules);
    }
}

TEST_CASE("access delay") {
  StationStats a, b;
  CHECK_FALSE(access_delay(a).has_value());
  a.delay_sum_us = 100;
  a.delay_count = 2;
  b.delay_sum_us = 50;
  b.delay_count = 3;
  CHECK(*access_delay(a) == 50.0);
  const std::vector<StationStats> both{a, b};
  CHECK(*access_delay(std::span<const StationStats>(both)) == doctest::Approx(30.0));
}

TEST_CASE("achievable rate brackets a stable load") {
  SimConfig c;
  c.traffic = TrafficModel::Mode::Poisson;
  const auto net = network_config(c);
  const auto pop = population(c, 16, 0);
  AchievableRateOptions o;
  o.horizon_seconds = 10;
  o.tolerance_pps = 2;
  o.seed = 3;
  const auto r = achievable_rate(net, pop, o);
  // Upper bound: every station once per schedule of successes.
  const double ceiling = 1e6 / (16 * c.phy.success_duration_us(1));
  CHECK(r.lambda_pps > 0.5 * ceiling);
  CHECK(r.lambda_pps <= ceiling * 1.05);
  CHECK(estimate_max_rho(net, pop, 0.5 * r.lambda_pps, 10, 99) < 1.0);
  CHECK(estimate_max_rho(net, pop, 1.5 * ceiling, 10, 99) >= 1.0);
}

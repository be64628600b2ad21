#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cfmac/kernels.hpp"
#include "cfmac/scenarios.hpp"

using namespace cfmac;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("cfmac_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("simulate fills convergence only for fixed saturated runs") {
  SimConfig c;
  c.horizon = 3;
  const auto m = simulate(c, 16, 0, 5);
  CHECK(m.kappa_schedules >= 0);
  CHECK(m.thr_norm > 0.7);
  CHECK(m.per_station_pps.size() == 16);
  CHECK(m.jain.size() == 10);

  c.error_rate = 0.1;
  const auto e = simulate(c, 16, 0, 5);
  CHECK(e.kappa_schedules == -1);
  CHECK(e.thr_norm < m.thr_norm);
}

TEST_CASE("converge_once agrees with simulate") {
  SimConfig c;
  c.horizon = 5;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const auto a = converge_once(c, s);
    const auto b = simulate(c, c.stations, 0, s);
    CHECK(a.kappa_schedules == b.kappa_schedules);
    CHECK(a.conv_seconds == doctest::Approx(b.conv_seconds).epsilon(1e-9));
    for (int k = 0; k < 10; ++k) CHECK(a.jain[k].has_value() == b.jain[k].has_value());
  }
}

TEST_CASE("new entrants reconverge") {
  SimConfig c;
  c.stations = 8;
  c.join_stations = 8;
  c.horizon = 30;
  const auto r = new_entrants_once(c, 3);
  CHECK(r.initial_seconds >= 0);
  REQUIRE(r.converged());
  CHECK(r.reconvergence_seconds < 30);
  c.protocol = ProtocolKind::Dcf;
  CHECK_THROWS(new_entrants_once(c, 3));
}

TEST_CASE("coexistence splits throughput") {
  SimConfig c;
  c.horizon = 3;
  const auto r = coexist_once(c, 4, 2);
  CHECK(r.dcf_norm > 0);
  CHECK(r.dcf_norm < r.aggregate_norm);
  CHECK(r.baseline_norm > 0);
}

TEST_CASE("scenario files, rows and determinism") {
  SimConfig c;
  c.horizon = 1;
  c.replications = 3;
  c.sweep = SweepKind::Stations;
  c.sweep_values = {4, 8};
  const auto dir = scratch("thr");
  const auto out = run_scenario("throughput-vs-N", c, dir);
  REQUIRE(out.files.size() == 3);
  const auto runs = slurp(dir / "throughput-vs-N_runs.csv");
  const auto agg = slurp(dir / "throughput-vs-N.csv");
  CHECK(lines(runs) == 1 + 6);
  CHECK(lines(agg) == 1 + 2);
  CHECK(runs.rfind("seed,protocol,N,", 0) == 0);
  CHECK(slurp(dir / "throughput-vs-N_config.txt").find("# config_hash") != std::string::npos);

  const auto again = scratch("thr2");
  run_scenario("throughput-vs-N", c, again);
  CHECK(slurp(again / "throughput-vs-N_runs.csv") == runs);
  CHECK(slurp(again / "throughput-vs-N.csv") == agg);
  fs::remove_all(dir);
  fs::remove_all(again);
}

TEST_CASE("scenario kinds check their inputs") {
  SimConfig c;
  c.replications = 2;
  c.horizon = 1;
  const auto dir = scratch("bad");
  CHECK_THROWS_AS(run_scenario("delay-vs-N", c, dir), std::invalid_argument);
  CHECK_THROWS_AS(run_scenario("new-entrants", c, dir), std::invalid_argument);
  CHECK_THROWS_AS(run_scenario("nope", c, dir), std::invalid_argument);
  c.protocol = ProtocolKind::Dcf;
  CHECK_THROWS_AS(run_scenario("converge-sweep", c, dir), std::invalid_argument);
  fs::remove_all(dir);
}

TEST_CASE("every scenario kind runs") {
  const auto dir = scratch("kinds");
  SimConfig base;
  base.replications = 2;
  base.horizon = 2;
  for (auto kind : scenario_kinds()) {
    SimConfig c = base;
    if (kind == "delay-vs-N") {
      c.traffic = TrafficModel::Mode::Poisson;
      c.arrival_rate_pps = 50;
    }
    if (kind == "error-robustness") c.error_rate = 0.1;
    if (kind == "new-entrants") {
      c.stations = 4;
      c.join_stations = 2;
      c.horizon = 20;
    }
    if (kind == "coexist") c.stations = 3;
    const auto out = run_scenario(kind, c, dir);
    for (const auto& f : out.files) CHECK(fs::file_size(f) > 0);
  }
  fs::remove_all(dir);
}

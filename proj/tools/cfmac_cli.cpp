// cfmac: command line front end for simulations, scenarios and the chain model.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "cfmac/adaptation.hpp"
#include "cfmac/config.hpp"
#include "cfmac/kernels.hpp"
#include "cfmac/markov.hpp"
#include "cfmac/scenarios.hpp"
#include "cfmac/trace.hpp"

using namespace cfmac;

namespace {

// Exit codes: 0 ok, 1 runtime failure, 2 invalid config.
constexpr int kInvalidConfig = 2;

std::optional<SimConfig> load_config(const std::string& path) {
  std::string text;
  if (!path.empty()) {
    std::ifstream is(path);
    if (!is) {
      std::cerr << "cannot read config " << path << '\n';
      return std::nullopt;
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    text = ss.str();
  }
  auto res = validate_config(text);
  for (const auto& d : res.diagnostics) std::cerr << path << ": " << to_string(d) << '\n';
  if (!res.ok()) return std::nullopt;
  return res.config;
}

void apply_overrides(SimConfig& c, const std::optional<std::uint64_t>& seed, const std::optional<int>& reps) {
  if (seed) c.seed = *seed;
  if (reps) c.replications = *reps;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collision-free MAC simulator"};
  app.require_subcommand(1);

  std::string config_path, out, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;

  // validate
  auto* validate = app.add_subcommand("validate", "Check a config file and print its canonical form");
  validate->add_option("--config", config_path, "config file")->required();

  // sim
  std::string trace_path;
  auto* sim = app.add_subcommand("sim", "Run replications of one configuration");
  sim->add_option("--config", config_path, "config file");
  sim->add_option("--seed", seed, "base seed");
  sim->add_option("--reps", reps, "replications");
  sim->add_option("--out", out, "CSV file for per-run metrics (stdout when omitted)");
  sim->add_option("--trace", trace_path, "write the slot trace of the first replication");

  // scenario
  std::string kind;
  const auto kinds = scenario_kinds();
  auto* scenario = app.add_subcommand("scenario", "Run a named scenario");
  scenario->add_option("kind", kind, "scenario kind")
      ->required()
      ->check(CLI::IsMember(std::vector<std::string>(kinds.begin(), kinds.end())));
  scenario->add_option("--config", config_path, "config file");
  scenario->add_option("--seed", seed, "base seed");
  scenario->add_option("--reps", reps, "replications");
  scenario->add_option("--out", out_dir, "output directory")->default_val("results");

  // markov
  std::vector<int> lengths{16}, station_counts{16};
  std::vector<double> gammas{0.25};
  bool numeric_only = false;
  auto* markov = app.add_subcommand("markov", "L-ZC chain: spectral radius and mean convergence");
  markov->add_option("-C,--length", lengths, "schedule lengths")->delimiter(',');
  markov->add_option("-N,--stations", station_counts, "station counts")->delimiter(',');
  markov->add_option("-g,--gamma", gammas, "stickiness values")->delimiter(',');
  markov->add_flag("--lambda-only", numeric_only, "skip the mean convergence solve");

  // ftable
  std::vector<int> ft_lengths{16, 32, 64, 128, 256};
  int ft_reps = 1000;
  double confidence = 0.95;
  auto* ftable = app.add_subcommand("ftable", "Build the A-L-MAC convergence table");
  ftable->add_option("--lengths", ft_lengths, "schedule lengths")->delimiter(',');
  ftable->add_option("--reps", ft_reps, "replications per length");
  ftable->add_option("--seed", seed, "seed");
  ftable->add_option("--confidence", confidence, "coverage level")->check(CLI::Range(0.5, 0.9999));
  ftable->add_option("--out", out, "CSV output (stdout when omitted)");

  // reproduce-all
  ReproduceOptions ro;
  std::string ro_ftable;
  auto* reproduce = app.add_subcommand("reproduce-all", "Write the data behind every evaluation figure");
  reproduce->add_option("--out", out_dir, "output directory")->default_val("results");
  reproduce->add_option("--seed", ro.seed, "base seed");
  reproduce->add_option("--reps", ro.replications, "slot-level replications per point");
  reproduce->add_option("--kernel-reps", ro.kernel_replications, "schedule-level replications per point");
  reproduce->add_option("--horizon", ro.horizon_seconds, "seconds per slot-level run");
  reproduce->add_option("--ftable", ro_ftable, "existing f-table CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInvalidConfig;
  }

  try {
    if (*validate) {
      auto c = load_config(config_path);
      if (!c) return kInvalidConfig;
      std::cout << to_text(*c);
      return 0;
    }

    if (*sim) {
      auto c = load_config(config_path);
      if (!c) return kInvalidConfig;
      apply_overrides(*c, seed, reps);
      std::ofstream file;
      std::ostream* os = &std::cout;
      if (!out.empty()) {
        file.open(out);
        if (!file) throw std::runtime_error("cannot write " + out);
        os = &file;
      }
      const auto hash = config_hash(*c);
      const auto res = replicate(c->replications, c->seed, [&](std::uint64_t s, int) {
        return simulate(*c, c->stations, c->dcf_stations, s);
      });
      write_metrics_header(*os);
      for (int r = 0; r < c->replications; ++r)
        write_metrics_row(*os, *c, c->stations, replication_seed(c->seed, r), hash, res[r]);
      if (!trace_path.empty()) {
        NetworkConfig nc = network_config(*c);
        nc.record_trace = true;
        Network net(nc, replication_seed(c->seed, 0));
        for (const auto& spec : population(*c, c->stations, c->dcf_stations)) net.add_station(spec);
        const double limit = c->horizon;
        while (c->horizon_unit == Horizon::Unit::Slots ? static_cast<double>(net.slot_index()) < limit
                                                       : net.now_us() < limit * 1e6)
          net.step();
        std::ofstream ts(trace_path);
        if (!ts) throw std::runtime_error("cannot write " + trace_path);
        write_trace_csv(ts, net.trace());
      }
      return 0;
    }

    if (*scenario) {
      auto c = load_config(config_path);
      if (!c) return kInvalidConfig;
      apply_overrides(*c, seed, reps);
      try {
        const auto res = run_scenario(kind, *c, out_dir);
        for (const auto& f : res.files) std::cout << f.string() << '\n';
      } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return kInvalidConfig;
      }
      return 0;
    }

    if (*markov) {
      std::cout << "C,N,gamma,lambda_closed,lambda_numeric,E_schedules\n" << std::setprecision(12);
      for (int c : lengths)
        for (int n : station_counts)
          for (double g : gammas) {
            if (n < 2 || n > c || n > kMaxChainStations) {
              std::cerr << "skipping C=" << c << " N=" << n << ": needs 2 <= N <= min(C, " << kMaxChainStations
                        << ")\n";
              continue;
            }
            const auto chain = build_chain(c, n, g);
            const auto eig = second_eigenvalue(chain);
            std::cout << c << ',' << n << ',' << g << ',' << lambda_star_closed(c, n, g) << ',' << eig.lambda << ',';
            if (!numeric_only) std::cout << mean_convergence(chain);
            std::cout << '\n';
          }
      return 0;
    }

    if (*ftable) {
      FTableOptions fo;
      fo.replications = ft_reps;
      fo.confidence = confidence;
      if (seed) fo.seed = *seed;
      const auto table = f_table_build(ft_lengths, fo);
      if (out.empty()) {
        table.write_csv(std::cout);
      } else {
        std::ofstream os(out);
        if (!os) throw std::runtime_error("cannot write " + out);
        table.write_csv(os);
      }
      return 0;
    }

    if (*reproduce) {
      ro.ftable = ro_ftable;
      const auto report = reproduce_all(out_dir, ro);
      for (const auto& f : report.written) std::cout << "wrote " << f.string() << '\n';
      for (const auto& [name, why] : report.failed) std::cerr << "failed " << name << ": " << why << '\n';
      return report.failed.empty() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

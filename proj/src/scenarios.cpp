#include "cfmac/scenarios.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cfmac/kernels.hpp"
#include "cfmac/markov.hpp"
#include "cfmac/throughput_model.hpp"

namespace cfmac {

namespace {

constexpr int kJainWindows = 10;

bool horizon_reached(const Network& net, const SimConfig& c, double offset_us = 0.0) {
  if (c.horizon_unit == Horizon::Unit::Slots) return static_cast<double>(net.slot_index()) >= c.horizon;
  return net.now_us() - offset_us >= c.horizon * 1e6;
}

std::string opt(const std::optional<double>& v) {
  if (!v) return {};
  std::ostringstream os;
  os << std::setprecision(10) << *v;
  return os.str();
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::vector<double> values_of(std::span<const std::optional<double>> xs) {
  std::vector<double> out;
  for (const auto& x : xs)
    if (x) out.push_back(*x);
  return out;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

}  // namespace

RunMetrics simulate(const SimConfig& c, int stations, int dcf_stations, std::uint64_t seed) {
  NetworkConfig net_cfg = network_config(c);
  const auto pop = population(c, stations, dcf_stations);
  validate_population(net_cfg, pop);
  Network net(net_cfg, seed);
  for (const auto& spec : pop) net.add_station(spec);

  const bool fixed = c.adaptation == AdaptationKind::None && c.error_rate == 0.0 &&
                     c.traffic == TrafficModel::Mode::Saturated && dcf_stations == 0 &&
                     c.protocol != ProtocolKind::Dcf;
  std::optional<AlignedConvergenceDetector> detector;
  if (fixed) {
    detector.emplace(stations, c.length);
    detector->keep_successes(true);
  }

  std::uint64_t attempts = 0, collided = 0, delivered = 0;
  while (!horizon_reached(net, c)) {
    const auto index = net.slot_index();
    const double start = net.now_us();
    const auto& out = net.step();
    switch (out.kind) {
      case SlotKind::Idle: break;
      case SlotKind::Success:
        ++attempts;
        delivered += out.packets;
        break;
      case SlotKind::Error: ++attempts; break;
      case SlotKind::Collision:
        attempts += out.transmitters.size();
        collided += out.transmitters.size();
        break;
    }
    if (detector && !detector->converged()) detector->feed(out, index, start);
  }

  RunMetrics m;
  const auto thr = throughput(delivered, net.now_us(), c.phy);
  m.thr_norm = thr.normalised;
  m.thr_mbps = thr.mbps;
  if (attempts > 0) m.coll_rate = static_cast<double>(collided) / static_cast<double>(attempts);
  std::vector<StationStats> stats;
  for (const auto& st : net.stations()) {
    stats.push_back(st.stats);
    m.per_station_pps.push_back(static_cast<double>(st.stats.delivered_packets) / (net.now_us() * 1e-6));
  }
  m.mean_delay_us = access_delay(std::span<const StationStats>(stats));
  m.jain.assign(kJainWindows, std::nullopt);
  if (detector && detector->converged()) {
    m.kappa_schedules = detector->result().schedules;
    m.conv_seconds = detector->result().seconds;
    const auto& seq = detector->successes_before();
    for (int k = 1; k <= kJainWindows; ++k) m.jain[k - 1] = jain_index(seq, stations, k);
  }
  return m;
}

RunMetrics converge_once(const SimConfig& c, std::uint64_t seed) {
  const auto spec = population(c, c.stations, 0).front();
  std::vector<int> successes;
  const auto sample = schedule_convergence_with_successes(c.protocol, c.stations, c.length, spec.params, seed,
                                                          c.cap_schedules, c.phy, successes);
  RunMetrics m;
  m.jain.assign(kJainWindows, std::nullopt);
  if (sample.converged()) {
    m.kappa_schedules = sample.schedules;
    m.conv_seconds = sample.seconds;
    for (int k = 1; k <= kJainWindows; ++k) m.jain[k - 1] = jain_index(successes, c.stations, k);
  }
  return m;
}

ReentryResult new_entrants_once(const SimConfig& c, std::uint64_t seed) {
  if (c.protocol == ProtocolKind::Dcf || c.adaptation != AdaptationKind::None)
    throw std::invalid_argument("new-entrants needs a fixed-length schedule protocol");
  const int total = c.stations + c.join_stations;
  const auto spec = population(c, total, 0).front();
  NetworkConfig net_cfg = network_config(c);
  Network net(net_cfg, seed);
  for (int i = 0; i < c.stations; ++i) net.add_station(spec);

  ReentryResult r;
  AlignedConvergenceDetector detector(c.stations, c.length);
  while (!detector.converged()) {
    if (horizon_reached(net, c)) return r;
    const auto index = net.slot_index();
    const double start = net.now_us();
    detector.feed(net.step(), index, start);
  }
  r.initial_seconds = net.now_us() * 1e-6;
  while (net.now_us() < c.join_time_s * 1e6) net.step();

  const double join_us = net.now_us();
  for (int i = 0; i < c.join_stations; ++i) net.add_station(spec);
  double last_collision_end = join_us;
  int clean = 0;
  while (clean < 2 * c.length) {
    if (horizon_reached(net, c, join_us)) return r;
    const auto& out = net.step();
    if (out.kind == SlotKind::Collision || out.kind == SlotKind::Error) {
      last_collision_end = net.now_us();
      clean = 0;
    } else {
      ++clean;
    }
  }
  r.reconvergence_seconds = (last_collision_end - join_us) * 1e-6;
  return r;
}

CoexistResult coexist_once(const SimConfig& c, int k, std::uint64_t seed) {
  auto run_pop = [&](int learners, int dcf, double& dcf_share) {
    NetworkConfig net_cfg = network_config(c);
    const auto pop = population(c, learners, dcf);
    validate_population(net_cfg, pop);
    Network net(net_cfg, seed);
    for (const auto& spec : pop) net.add_station(spec);
    while (!horizon_reached(net, c)) net.step();
    std::uint64_t all = 0, dcf_pk = 0;
    for (const auto& st : net.stations()) {
      all += st.stats.delivered_packets;
      if (st.spec.protocol == ProtocolKind::Dcf) dcf_pk += st.stats.delivered_packets;
    }
    dcf_share = throughput(dcf_pk, net.now_us(), c.phy).normalised;
    return throughput(all, net.now_us(), c.phy).normalised;
  };
  CoexistResult r;
  r.aggregate_norm = run_pop(k, k, r.dcf_norm);
  double unused = 0.0;
  SimConfig all_dcf = c;
  all_dcf.protocol = ProtocolKind::Dcf;
  all_dcf.adaptation = AdaptationKind::None;
  all_dcf.ftable_path.clear();
  r.baseline_norm = [&] {
    NetworkConfig net_cfg = network_config(all_dcf);
    const auto pop = population(all_dcf, 2 * k, 0);
    Network net(net_cfg, seed);
    for (const auto& spec : pop) net.add_station(spec);
    while (!horizon_reached(net, all_dcf)) net.step();
    std::uint64_t all = 0;
    for (const auto& st : net.stations()) all += st.stats.delivered_packets;
    return throughput(all, net.now_us(), c.phy).normalised;
  }();
  (void)unused;
  return r;
}

void write_metrics_header(std::ostream& os) {
  os << "seed,protocol,N,C_or_B,beta,gamma,err_rate,kappa_schedules,conv_seconds,thr_norm,thr_mbps,coll_rate,"
        "mean_delay_us";
  for (int k = 1; k <= kJainWindows; ++k) os << ",jain_m" << k;
  os << ",config_hash\n";
}

void write_metrics_row(std::ostream& os, const SimConfig& c, int stations, std::uint64_t seed, std::uint64_t hash,
                       const RunMetrics& m) {
  os << seed << ',' << to_string(c.protocol) << ',' << stations << ',' << c.length << ',' << num(c.beta) << ','
     << num(population(c, stations, 0).front().params.gamma) << ',' << num(c.error_rate) << ',';
  if (m.kappa_schedules >= 0) os << m.kappa_schedules << ',' << num(m.conv_seconds);
  else os << ',';
  os << ',' << num(m.thr_norm) << ',' << num(m.thr_mbps) << ',' << opt(m.coll_rate) << ',' << opt(m.mean_delay_us);
  for (int k = 0; k < kJainWindows; ++k)
    os << ',' << (k < static_cast<int>(m.jain.size()) ? opt(m.jain[k]) : std::string());
  os << ',' << std::hex << std::setw(16) << std::setfill('0') << hash << std::dec << std::setfill(' ') << '\n';
}

std::vector<std::string_view> scenario_kinds() {
  return {"converge-sweep", "throughput-vs-N", "delay-vs-N", "error-robustness", "new-entrants", "coexist"};
}

namespace {

SimConfig at_point(const SimConfig& base, double value) {
  SimConfig c = base;
  switch (base.sweep) {
    case SweepKind::None: break;
    case SweepKind::Beta: c.beta = value; break;
    case SweepKind::Gamma: c.gamma = value; break;
    case SweepKind::Stations: c.stations = static_cast<int>(value); break;
    case SweepKind::ErrorRate: c.error_rate = value; break;
  }
  c.sweep = SweepKind::None;
  c.sweep_values.clear();
  return c;
}

double point_value(const SimConfig& c, SweepKind kind) {
  switch (kind) {
    case SweepKind::None: return 0.0;
    case SweepKind::Beta: return c.beta;
    case SweepKind::Gamma: return c.effective_gamma();
    case SweepKind::Stations: return c.stations;
    case SweepKind::ErrorRate: return c.error_rate;
  }
  return 0.0;
}

void check_kind(std::string_view kind, const SimConfig& c) {
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument(std::string(kind) + ": " + why);
  };
  const bool schedule = c.protocol != ProtocolKind::Dcf;
  if (kind == "converge-sweep") {
    if (!schedule || c.adaptation != AdaptationKind::None) fail("needs a fixed-length schedule protocol");
    if (c.sweep == SweepKind::Stations || c.sweep == SweepKind::ErrorRate) fail("sweep beta or gamma");
    if (c.error_rate != 0.0) fail("convergence is measured on an error-free channel");
  } else if (kind == "delay-vs-N") {
    if (c.traffic != TrafficModel::Mode::Poisson) fail("needs traffic = poisson");
  } else if (kind == "error-robustness") {
    if (c.sweep != SweepKind::None && c.sweep != SweepKind::ErrorRate) fail("sweep error_rate");
  } else if (kind == "new-entrants") {
    if (!schedule || c.adaptation != AdaptationKind::None) fail("needs a fixed-length schedule protocol");
    if (c.join_stations < 1) fail("needs join_stations >= 1");
    if (c.traffic != TrafficModel::Mode::Saturated || c.error_rate != 0.0) fail("needs a saturated, error-free run");
  } else if (kind == "coexist") {
    if (c.sweep != SweepKind::None && c.sweep != SweepKind::Stations) fail("sweep stations (K)");
  } else if (kind != "throughput-vs-N") {
    fail("unknown scenario kind");
  }
}

}  // namespace

ScenarioOutput run_scenario(std::string_view kind, const SimConfig& config, const std::filesystem::path& out_dir) {
  check_kind(kind, config);
  if (auto d = check_config(config); !d.empty()) throw std::invalid_argument(to_string(d.front()));
  std::filesystem::create_directories(out_dir);
  ScenarioOutput result;
  const std::string name(kind);
  const auto runs_path = out_dir / (name + "_runs.csv");
  const auto agg_path = out_dir / (name + ".csv");
  const auto cfg_path = out_dir / (name + "_config.txt");
  auto runs = open_csv(runs_path);
  auto agg = open_csv(agg_path);
  auto echo = open_csv(cfg_path);

  std::vector<SimConfig> points;
  if (config.sweep == SweepKind::None) {
    points.push_back(config);
  } else {
    for (double v : config.sweep_values) points.push_back(at_point(config, v));
  }
  const std::string sweep_name(to_string(config.sweep));
  const int reps = config.replications;

  if (kind == "new-entrants") {
    runs << "seed,protocol,N,joined,C,initial_s,reconv_s,config_hash\n";
    agg << "sweep,value,reps,reconverged,reconv_s_mean,reconv_s_ci,initial_s_mean\n";
  } else if (kind == "coexist") {
    runs << "seed,protocol,K,aggregate_norm,dcf_norm,baseline_norm,config_hash\n";
    agg << "sweep,value,K,reps,aggregate_mean,aggregate_ci,dcf_mean,dcf_ci,baseline_mean,baseline_ci\n";
  } else {
    write_metrics_header(runs);
    if (kind == "converge-sweep") {
      agg << "sweep,value,N,C,reps,converged,kappa_mean,kappa_ci,conv_s_mean,conv_s_ci,theory_kappa";
      for (int k = 1; k <= kJainWindows; ++k) agg << ",jain_m" << k;
      agg << '\n';
    } else {
      agg << "sweep,value,N,reps,thr_norm_mean,thr_norm_ci,thr_mbps_mean,thr_mbps_ci,coll_rate_mean,coll_rate_ci,"
             "delay_us_mean,delay_us_ci,model_thr_norm\n";
    }
  }

  for (const auto& c : points) {
    const auto hash = config_hash(c);
    echo << "# config_hash " << std::hex << std::setw(16) << std::setfill('0') << hash << std::dec
         << std::setfill(' ') << '\n'
         << to_text(c) << '\n';
    const std::string value = config.sweep == SweepKind::None ? std::string() : num(point_value(c, config.sweep));
    std::ostringstream hash_hex;
    hash_hex << std::hex << std::setw(16) << std::setfill('0') << hash;

    if (kind == "new-entrants") {
      const auto res = replicate(reps, c.seed, [&](std::uint64_t s, int) { return new_entrants_once(c, s); });
      std::vector<double> reconv, initial;
      for (int r = 0; r < reps; ++r) {
        const auto seed = replication_seed(c.seed, r);
        runs << seed << ',' << to_string(c.protocol) << ',' << c.stations << ',' << c.join_stations << ','
             << c.length << ',' << (res[r].initial_seconds >= 0 ? num(res[r].initial_seconds) : "") << ','
             << (res[r].converged() ? num(res[r].reconvergence_seconds) : "") << ',' << hash_hex.str() << '\n';
        if (res[r].converged()) reconv.push_back(res[r].reconvergence_seconds);
        if (res[r].initial_seconds >= 0) initial.push_back(res[r].initial_seconds);
      }
      const auto s = summarize(reconv);
      agg << sweep_name << ',' << value << ',' << reps << ',' << reconv.size() << ',' << num(s.mean) << ','
          << num(s.ci_half_width) << ',' << num(summarize(initial).mean) << '\n';
      continue;
    }
    if (kind == "coexist") {
      const int k = c.stations;
      const auto res = replicate(reps, c.seed, [&](std::uint64_t s, int) { return coexist_once(c, k, s); });
      std::vector<double> a, d, b;
      for (int r = 0; r < reps; ++r) {
        runs << replication_seed(c.seed, r) << ',' << to_string(c.protocol) << ',' << k << ','
             << num(res[r].aggregate_norm) << ',' << num(res[r].dcf_norm) << ',' << num(res[r].baseline_norm) << ','
             << hash_hex.str() << '\n';
        a.push_back(res[r].aggregate_norm);
        d.push_back(res[r].dcf_norm);
        b.push_back(res[r].baseline_norm);
      }
      const auto sa = summarize(a), sd = summarize(d), sb = summarize(b);
      agg << sweep_name << ',' << value << ',' << k << ',' << reps << ',' << num(sa.mean) << ','
          << num(sa.ci_half_width) << ',' << num(sd.mean) << ',' << num(sd.ci_half_width) << ',' << num(sb.mean)
          << ',' << num(sb.ci_half_width) << '\n';
      continue;
    }

    const bool kernel = kind == "converge-sweep";
    const auto res = replicate(reps, c.seed, [&](std::uint64_t s, int) {
      return kernel ? converge_once(c, s) : simulate(c, c.stations, c.dcf_stations, s);
    });
    for (int r = 0; r < reps; ++r) write_metrics_row(runs, c, c.stations, replication_seed(c.seed, r), hash, res[r]);

    if (kernel) {
      std::vector<double> kappa, secs;
      std::vector<std::vector<double>> jain(kJainWindows);
      for (const auto& m : res) {
        if (m.kappa_schedules < 0) continue;
        kappa.push_back(static_cast<double>(m.kappa_schedules));
        secs.push_back(m.conv_seconds);
        for (int k = 0; k < kJainWindows; ++k)
          if (m.jain[k]) jain[k].push_back(*m.jain[k]);
      }
      std::string theory;
      if (c.protocol == ProtocolKind::Lzc && c.stations <= c.length && c.stations <= kMaxChainStations)
        theory = num(mean_convergence(build_chain(c.length, c.stations, c.effective_gamma())) - 1.0);
      const auto sk = summarize(kappa), ss = summarize(secs);
      agg << sweep_name << ',' << value << ',' << c.stations << ',' << c.length << ',' << reps << ','
          << kappa.size() << ',' << num(sk.mean) << ',' << num(sk.ci_half_width) << ',' << num(ss.mean) << ','
          << num(ss.ci_half_width) << ',' << theory;
      for (const auto& j : jain) agg << ',' << (j.empty() ? std::string() : num(summarize(j).mean));
      agg << '\n';
      continue;
    }

    std::vector<double> thr, mbps;
    std::vector<std::optional<double>> coll, delay;
    for (const auto& m : res) {
      thr.push_back(m.thr_norm);
      mbps.push_back(m.thr_mbps);
      coll.push_back(m.coll_rate);
      delay.push_back(m.mean_delay_us);
    }
    std::string model;
    if (c.adaptation == AdaptationKind::None && c.protocol != ProtocolKind::Dcf && c.dcf_stations == 0 &&
        c.error_rate == 0.0 && c.traffic == TrafficModel::Mode::Saturated)
      model = num(c.stations <= c.length ? throughput_underloaded(c.stations, c.length, c.phy)
                                         : throughput_overloaded(c.stations, c.length, c.phy));
    const auto st = summarize(thr), sm = summarize(mbps), sc = summarize(values_of(coll)),
               sd = summarize(values_of(delay));
    agg << sweep_name << ',' << value << ',' << c.stations << ',' << reps << ',' << num(st.mean) << ','
        << num(st.ci_half_width) << ',' << num(sm.mean) << ',' << num(sm.ci_half_width) << ','
        << (sc.n ? num(sc.mean) : "") << ',' << (sc.n ? num(sc.ci_half_width) : "") << ','
        << (sd.n ? num(sd.mean) : "") << ',' << (sd.n ? num(sd.ci_half_width) : "") << ',' << model << '\n';
  }
  result.files = {runs_path, agg_path, cfg_path};
  return result;
}

// ---- reproduce-all -------------------------------------------------------------

namespace {

struct Figure {
  std::string name;
  std::function<void(std::ostream&)> body;
};

SimConfig base_config(const ReproduceOptions& o) {
  SimConfig c;
  c.horizon = o.horizon_seconds;
  c.horizon_unit = Horizon::Unit::Seconds;
  c.replications = o.replications;
  c.seed = o.seed;
  return c;
}

template <class Fn>
Summary summarize_runs(int reps, std::uint64_t seed, Fn&& fn) {
  const auto v = replicate(reps, seed, [&](std::uint64_t s, int) { return fn(s); });
  return summarize(v);
}

}  // namespace

ReproduceReport reproduce_all(const std::filesystem::path& out_dir, const ReproduceOptions& o) {
  std::filesystem::create_directories(out_dir);
  ReproduceReport report;
  const std::vector<ProtocolKind> fixed = {ProtocolKind::Dcf, ProtocolKind::Lbeb, ProtocolKind::Zc, ProtocolKind::Lzc,
                                           ProtocolKind::Lmac};
  const std::vector<ProtocolKind> learners = {ProtocolKind::Lbeb, ProtocolKind::Zc, ProtocolKind::Lzc,
                                              ProtocolKind::Lmac};

  std::filesystem::path ftable_path = o.ftable;
  if (ftable_path.empty()) {
    ftable_path = out_dir / "ftable.csv";
    try {
      const std::vector<int> lengths = {16, 32, 64, 128};
      FTableOptions fo;
      fo.seed = o.seed;
      fo.replications = std::max(1000, o.kernel_replications);
      const auto table = f_table_build(lengths, fo);
      auto os = open_csv(ftable_path);
      table.write_csv(os);
      report.written.push_back(ftable_path);
    } catch (const std::exception& e) {
      report.failed.emplace_back("ftable", e.what());
      ftable_path.clear();
    }
  }

  // Variants of the adaptive schemes as (label, protocol, adaptation).
  struct Variant {
    std::string label;
    ProtocolKind protocol;
    AdaptationKind adaptation;
  };
  const std::vector<Variant> adaptive = {{"dcf", ProtocolKind::Dcf, AdaptationKind::None},
                                         {"azc", ProtocolKind::Zc, AdaptationKind::Mimd},
                                         {"alzc", ProtocolKind::Lzc, AdaptationKind::Mimd},
                                         {"almac", ProtocolKind::Lmac, AdaptationKind::Almac}};
  auto variant_config = [&](const Variant& v) {
    SimConfig c = base_config(o);
    c.protocol = v.protocol;
    c.adaptation = v.adaptation;
    if (v.adaptation == AdaptationKind::Almac) {
      if (ftable_path.empty()) throw std::runtime_error("no f-table available for almac");
      c.ftable_path = ftable_path.string();
    }
    return c;
  };

  auto throughput_row = [&](std::ostream& os, const std::string& label, const SimConfig& c, int n) {
    const auto res = replicate(c.replications, c.seed, [&](std::uint64_t s, int) { return simulate(c, n, 0, s); });
    std::vector<double> thr, mbps;
    std::vector<std::optional<double>> coll, delay;
    for (const auto& m : res) {
      thr.push_back(m.thr_norm);
      mbps.push_back(m.thr_mbps);
      coll.push_back(m.coll_rate);
      delay.push_back(m.mean_delay_us);
    }
    const auto st = summarize(thr), sm = summarize(mbps), sc = summarize(values_of(coll)),
               sd = summarize(values_of(delay));
    os << label << ',' << n << ',' << c.replications << ',' << num(st.mean) << ',' << num(st.ci_half_width) << ','
       << num(sm.mean) << ',' << num(sm.ci_half_width) << ',' << (sc.n ? num(sc.mean) : "") << ','
       << (sc.n ? num(sc.ci_half_width) : "") << ',' << (sd.n ? num(sd.mean) : "") << ','
       << (sd.n ? num(sd.ci_half_width) : "") << '\n';
  };
  const std::string thr_header =
      "protocol,N,reps,thr_norm_mean,thr_norm_ci,thr_mbps_mean,thr_mbps_ci,coll_rate_mean,coll_rate_ci,"
      "delay_us_mean,delay_us_ci\n";

  auto kernel_row = [&](std::ostream& os, const std::string& prefix, ProtocolKind kind, int n, int length,
                        const ProtocolParams& params) {
    const auto res = replicate(o.kernel_replications, o.seed, [&](std::uint64_t s, int) {
      return schedule_convergence(kind, n, length, params, s, 1'000'000, SimConfig::experiment_phy());
    });
    std::vector<double> k, sec;
    for (const auto& r : res)
      if (r.converged()) {
        k.push_back(static_cast<double>(r.schedules));
        sec.push_back(r.seconds);
      }
    const auto sk = summarize(k), ss = summarize(sec);
    os << prefix << ',' << o.kernel_replications << ',' << k.size() << ',' << num(sk.mean) << ','
       << num(sk.ci_half_width) << ',' << num(ss.mean) << ',' << num(ss.ci_half_width) << '\n';
  };

  std::vector<Figure> figures;
  std::vector<int> n_grid;
  for (int n = 2; n <= 32; n += 2) n_grid.push_back(n);

  figures.push_back({"throughput_vs_n", [&](std::ostream& os) {
                       os << thr_header;
                       for (auto p : fixed) {
                         SimConfig c = base_config(o);
                         c.protocol = p;
                         for (int n : n_grid) throughput_row(os, std::string(to_string(p)), c, n);
                       }
                     }});
  figures.push_back({"convergence_vs_beta", [&](std::ostream& os) {
                       os << "protocol,beta,reps,converged,kappa_mean,kappa_ci,conv_s_mean,conv_s_ci\n";
                       for (double beta : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99}) {
                         ProtocolParams p;
                         p.beta = beta;
                         kernel_row(os, "lmac," + num(beta), ProtocolKind::Lmac, 16, 16, p);
                       }
                       kernel_row(os, "lbeb,", ProtocolKind::Lbeb, 16, 16, ProtocolParams{});
                     }});
  figures.push_back({"lzc_gamma_theory_vs_sim", [&](std::ostream& os) {
                       os << "protocol,gamma,reps,converged,kappa_mean,kappa_ci,conv_s_mean,conv_s_ci,theory_kappa\n";
                       for (int g = 1; g <= 19; ++g) {
                         ProtocolParams p;
                         p.gamma = 0.05 * g;
                         std::ostringstream row;
                         kernel_row(row, "lzc," + num(p.gamma), ProtocolKind::Lzc, 16, 16, p);
                         std::string line = row.str();
                         line.pop_back();
                         os << line << ',' << num(mean_convergence(build_chain(16, 16, p.gamma)) - 1.0) << '\n';
                       }
                       std::ostringstream row;
                       kernel_row(row, "zc,", ProtocolKind::Zc, 16, 16, ProtocolParams{});
                       std::string line = row.str();
                       line.pop_back();
                       os << line << ",\n";
                     }});
  figures.push_back({"jain_vs_m", [&](std::ostream& os) {
                       os << "beta,m,runs_with_window,jain_mean,jain_ci\n";
                       for (double beta : {0.5, 0.8, 0.9, 0.95, 0.99}) {
                         SimConfig c = base_config(o);
                         c.beta = beta;
                         const auto res = replicate(o.kernel_replications, o.seed,
                                                    [&](std::uint64_t s, int) { return converge_once(c, s); });
                         for (int k = 0; k < kJainWindows; ++k) {
                           std::vector<double> v;
                           for (const auto& m : res)
                             if (m.jain[k]) v.push_back(*m.jain[k]);
                           const auto s = summarize(v);
                           os << num(beta) << ',' << k + 1 << ',' << v.size() << ',' << num(s.mean) << ','
                              << num(s.ci_half_width) << '\n';
                         }
                       }
                     }});
  figures.push_back({"achievable_rate_vs_beta", [&](std::ostream& os) {
                       os << "N,beta,reps,lambda_pps_mean,lambda_pps_ci,lambda_mbps_mean\n";
                       for (int n : {20, 24})
                         for (double beta : {0.5, 0.7, 0.8, 0.9, 0.95, 0.99}) {
                           SimConfig c = base_config(o);
                           c.beta = beta;
                           c.traffic = TrafficModel::Mode::Poisson;
                           const auto pop = population(c, n, 0);
                           const auto net_cfg = network_config(c);
                           const int reps = std::max(2, o.replications / 4);
                           const auto s = summarize_runs(reps, mix_seed(o.seed, n), [&](std::uint64_t seed) {
                             AchievableRateOptions ao;
                             ao.seed = seed;
                             ao.horizon_seconds = o.horizon_seconds;
                             return achievable_rate(net_cfg, pop, ao).lambda_pps;
                           });
                           os << n << ',' << num(beta) << ',' << reps << ',' << num(s.mean) << ','
                              << num(s.ci_half_width) << ',' << num(s.mean * c.phy.payload_bytes * 8e-6) << '\n';
                         }
                     }});
  figures.push_back({"convergence_time_vs_n_over_c", [&](std::ostream& os) {
                       os << "protocol,N,N_over_C,reps,converged,kappa_mean,kappa_ci,conv_s_mean,conv_s_ci\n";
                       for (auto p : learners)
                         for (int n = 5; n <= 16; ++n) {
                           ProtocolParams params;
                           params.gamma = 1.0 / (16 - n + 2);
                           kernel_row(os, std::string(to_string(p)) + ',' + std::to_string(n) + ',' + num(n / 16.0), p,
                                      n, 16, params);
                         }
                     }});
  figures.push_back({"collision_rate_vs_n", [&](std::ostream& os) {
                       os << thr_header;
                       for (auto p : fixed) {
                         SimConfig c = base_config(o);
                         c.protocol = p;
                         c.seed = mix_seed(o.seed, 7);
                         for (int n : n_grid) throughput_row(os, std::string(to_string(p)), c, n);
                       }
                     }});
  figures.push_back({"throughput_model_vs_sim", [&](std::ostream& os) {
                       os << "N,reps,sim_thr_norm_mean,sim_thr_norm_ci,model_thr_norm\n";
                       SimConfig c = base_config(o);
                       c.phy = PhyParams{};
                       for (int n : n_grid) {
                         const auto s = summarize_runs(c.replications, c.seed,
                                                       [&](std::uint64_t seed) { return simulate(c, n, 0, seed).thr_norm; });
                         const double model = n <= c.length ? throughput_underloaded(n, c.length, c.phy)
                                                            : throughput_overloaded(n, c.length, c.phy);
                         os << n << ',' << c.replications << ',' << num(s.mean) << ',' << num(s.ci_half_width) << ','
                            << num(model) << '\n';
                       }
                     }});
  figures.push_back({"adaptive_throughput_vs_n", [&](std::ostream& os) {
                       os << thr_header;
                       for (const auto& v : adaptive) {
                         const SimConfig c = variant_config(v);
                         for (int n = 4; n <= 40; n += 4) throughput_row(os, v.label, c, n);
                       }
                     }});
  figures.push_back({"delay_vs_n", [&](std::ostream& os) {
                       os << thr_header;
                       std::vector<Variant> all = {{"dcf", ProtocolKind::Dcf, AdaptationKind::None},
                                                   {"lbeb", ProtocolKind::Lbeb, AdaptationKind::None},
                                                   {"zc", ProtocolKind::Zc, AdaptationKind::None},
                                                   {"lzc", ProtocolKind::Lzc, AdaptationKind::None},
                                                   {"lmac", ProtocolKind::Lmac, AdaptationKind::None},
                                                   {"azc", ProtocolKind::Zc, AdaptationKind::Mimd},
                                                   {"alzc", ProtocolKind::Lzc, AdaptationKind::Mimd},
                                                   {"almac", ProtocolKind::Lmac, AdaptationKind::Almac}};
                       for (const auto& v : all) {
                         SimConfig c = variant_config(v);
                         c.traffic = TrafficModel::Mode::Poisson;
                         c.arrival_rate_pps = 0.5e6 / (8.0 * c.phy.payload_bytes);
                         for (int n = 8; n <= 20; ++n) throughput_row(os, v.label, c, n);
                       }
                     }});
  figures.push_back({"throughput_with_errors", [&](std::ostream& os) {
                       os << "error_rate," << thr_header;
                       for (double fer : {0.01, 0.1})
                         for (auto p : fixed) {
                           SimConfig c = base_config(o);
                           c.protocol = p;
                           c.error_rate = fer;
                           for (int n : n_grid) {
                             os << num(fer) << ',';
                             throughput_row(os, std::string(to_string(p)), c, n);
                           }
                         }
                     }});
  figures.push_back({"new_entrants", [&](std::ostream& os) {
                       os << "protocol,initial_N,added,reps,reconverged,reconv_s_mean,reconv_s_ci\n";
                       for (auto p : {ProtocolKind::Zc, ProtocolKind::Lzc, ProtocolKind::Lmac})
                         for (int k = 1; k <= 8; ++k) {
                           SimConfig c = base_config(o);
                           c.protocol = p;
                           c.stations = 8;
                           c.join_stations = k;
                           c.horizon = 60.0;
                           const auto res = replicate(o.replications, o.seed,
                                                      [&](std::uint64_t s, int) { return new_entrants_once(c, s); });
                           std::vector<double> v;
                           for (const auto& r : res)
                             if (r.converged()) v.push_back(r.reconvergence_seconds);
                           const auto s = summarize(v);
                           os << to_string(p) << ",8," << k << ',' << o.replications << ',' << v.size() << ','
                              << num(s.mean) << ',' << num(s.ci_half_width) << '\n';
                         }
                     }});
  figures.push_back({"coexistence", [&](std::ostream& os) {
                       os << "protocol,K,reps,aggregate_mean,aggregate_ci,dcf_only_mean,dcf_only_ci,all_dcf_mean,"
                             "all_dcf_ci\n";
                       std::vector<Variant> all = {{"lbeb", ProtocolKind::Lbeb, AdaptationKind::None},
                                                   {"zc", ProtocolKind::Zc, AdaptationKind::None},
                                                   {"lzc", ProtocolKind::Lzc, AdaptationKind::None},
                                                   {"lmac", ProtocolKind::Lmac, AdaptationKind::None},
                                                   {"alzc", ProtocolKind::Lzc, AdaptationKind::Mimd},
                                                   {"almac", ProtocolKind::Lmac, AdaptationKind::Almac}};
                       for (const auto& v : all) {
                         const SimConfig c = variant_config(v);
                         for (int k = 2; k <= 20; k += 2) {
                           const auto res = replicate(c.replications, c.seed,
                                                      [&](std::uint64_t s, int) { return coexist_once(c, k, s); });
                           std::vector<double> a, d, b;
                           for (const auto& r : res) {
                             a.push_back(r.aggregate_norm);
                             d.push_back(r.dcf_norm);
                             b.push_back(r.baseline_norm);
                           }
                           const auto sa = summarize(a), sd = summarize(d), sb = summarize(b);
                           os << v.label << ',' << k << ',' << c.replications << ',' << num(sa.mean) << ','
                              << num(sa.ci_half_width) << ',' << num(sd.mean) << ',' << num(sd.ci_half_width) << ','
                              << num(sb.mean) << ',' << num(sb.ci_half_width) << '\n';
                         }
                       }
                     }});

  for (const auto& fig : figures) {
    const auto path = out_dir / (fig.name + ".csv");
    try {
      std::ostringstream buffer;
      fig.body(buffer);
      auto os = open_csv(path);
      os << buffer.str();
      report.written.push_back(path);
    } catch (const std::exception& e) {
      report.failed.emplace_back(fig.name, e.what());
    }
  }
  return report;
}

}  // namespace cfmac

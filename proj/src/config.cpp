#include "cfmac/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cfmac {

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::None: return "none";
    case SweepKind::Beta: return "beta";
    case SweepKind::Gamma: return "gamma";
    case SweepKind::Stations: return "stations";
    case SweepKind::ErrorRate: return "error_rate";
  }
  return "?";
}

PhyParams SimConfig::experiment_phy() {
  PhyParams phy;
  phy.payload_bytes = 1000;
  return phy;
}

double SimConfig::effective_gamma() const {
  if (gamma) return *gamma;
  if (stations <= length) return 1.0 / (length - stations + 2);
  return 0.5;
}

ProtocolParams SimConfig::protocol_params() const {
  ProtocolParams p;
  p.beta = beta;
  p.gamma = adaptation == AdaptationKind::ApAnnounced && !gamma ? 0.5 : effective_gamma();
  return p;
}

std::string to_string(const Diagnostic& d) {
  std::string s;
  if (d.line > 0) s += "line " + std::to_string(d.line) + ": ";
  s += d.key;
  if (!d.value.empty()) s += " = '" + d.value + "'";
  s += ": " + d.constraint;
  return s;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t used = 0;
  try {
    const double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

template <class Int>
std::optional<Int> parse_int(const std::string& s) {
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    // Accept integral doubles such as 1e6.
    const auto d = parse_double(s);
    if (!d || *d != static_cast<double>(static_cast<Int>(*d))) return std::nullopt;
    return static_cast<Int>(*d);
  }
  return v;
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::vector<Diagnostic> check_config(const SimConfig& c) {
  std::vector<Diagnostic> out;
  auto bad = [&](std::string key, std::string value, std::string constraint) {
    out.push_back({0, std::move(key), std::move(value), std::move(constraint)});
  };
  if (c.stations < 1) bad("stations", std::to_string(c.stations), "must be >= 1");
  if (c.dcf_stations < 0) bad("dcf_stations", std::to_string(c.dcf_stations), "must be >= 0");
  if (c.length < 1) bad("length", std::to_string(c.length), "must be >= 1");
  if (c.max_length < c.length || (c.length >= 1 && !is_power_of_two_multiple(c.max_length, c.length)))
    bad("max_length", std::to_string(c.max_length), "must be length times a power of two");
  if (c.ap_initial_length < 1) bad("ap_initial_length", std::to_string(c.ap_initial_length), "must be >= 1");
  if (!(c.beta > 0.0 && c.beta < 1.0)) bad("beta", fmt(c.beta), "must lie in (0,1)");
  if (c.gamma && !(*c.gamma > 0.0 && *c.gamma < 1.0)) bad("gamma", fmt(*c.gamma), "must lie in (0,1)");
  if (!(c.arrival_rate_pps >= 0.0)) bad("arrival_rate", fmt(c.arrival_rate_pps), "must be >= 0");
  if (c.queue_capacity < 1) bad("queue_capacity", std::to_string(c.queue_capacity), "must be >= 1");
  if (!(c.error_rate >= 0.0 && c.error_rate <= 1.0)) bad("error_rate", fmt(c.error_rate), "must lie in [0,1]");
  if (!(c.horizon > 0.0)) bad("horizon", fmt(c.horizon), "must be > 0");
  if (c.cap_schedules < 1) bad("cap_schedules", std::to_string(c.cap_schedules), "must be >= 1");
  if (c.replications < 1) bad("replications", std::to_string(c.replications), "must be >= 1");
  if (c.join_stations < 0) bad("join_stations", std::to_string(c.join_stations), "must be >= 0");
  if (!(c.join_time_s >= 0.0)) bad("join_time", fmt(c.join_time_s), "must be >= 0");
  if (c.protocol == ProtocolKind::Dcf && c.adaptation != AdaptationKind::None)
    bad("adaptation", std::string(to_string(c.adaptation)), "DCF has no schedule to adapt");
  if (c.adaptation == AdaptationKind::Mimd && c.protocol != ProtocolKind::Lzc && c.protocol != ProtocolKind::Zc)
    bad("adaptation", "alzc", "needs protocol zc or lzc");
  if (c.adaptation == AdaptationKind::Almac) {
    if (c.protocol != ProtocolKind::Lmac) bad("adaptation", "almac", "needs protocol lmac");
    if (c.ftable_path.empty()) bad("ftable", "", "almac needs an f-table file");
  }
  if (c.sweep != SweepKind::None && c.sweep_values.empty())
    bad("sweep_values", "", "a sweep needs at least one value");
  if (c.sweep == SweepKind::Gamma && c.protocol != ProtocolKind::Lzc)
    bad("sweep", "gamma", "gamma sweeps need protocol lzc");
  if (c.sweep == SweepKind::Beta && c.protocol != ProtocolKind::Lmac)
    bad("sweep", "beta", "beta sweeps need protocol lmac");
  for (double v : c.sweep_values) {
    if ((c.sweep == SweepKind::Beta || c.sweep == SweepKind::Gamma) && !(v > 0.0 && v < 1.0))
      bad("sweep_values", fmt(v), "must lie in (0,1)");
    if (c.sweep == SweepKind::ErrorRate && !(v >= 0.0 && v <= 1.0)) bad("sweep_values", fmt(v), "must lie in [0,1]");
    if (c.sweep == SweepKind::Stations && !(v >= 1.0 && v == static_cast<int>(v)))
      bad("sweep_values", fmt(v), "station counts must be integers >= 1");
  }
  try {
    c.phy.validate();
  } catch (const std::exception& e) {
    bad("phy", "", e.what());
  }
  return out;
}

ConfigResult validate_config(std::string_view text) {
  ConfigResult result;
  SimConfig c;
  std::optional<double> arrival_mbps;
  auto& diags = result.diagnostics;

  using Setter = std::function<std::optional<std::string>(const std::string&)>;
  auto real = [](double& field) -> Setter {
    return [&field](const std::string& v) -> std::optional<std::string> {
      const auto d = parse_double(v);
      if (!d) return "expected a number";
      field = *d;
      return std::nullopt;
    };
  };
  auto integer = [](int& field) -> Setter {
    return [&field](const std::string& v) -> std::optional<std::string> {
      const auto d = parse_int<int>(v);
      if (!d) return "expected an integer";
      field = *d;
      return std::nullopt;
    };
  };

  std::map<std::string, Setter> setters = {
      {"protocol",
       [&](const std::string& v) -> std::optional<std::string> {
         const auto p = parse_protocol(v);
         if (!p) return "one of dcf, lbeb, zc, lzc, lmac";
         c.protocol = *p;
         return std::nullopt;
       }},
      {"adaptation",
       [&](const std::string& v) -> std::optional<std::string> {
         const auto a = parse_adaptation(v);
         if (!a) return "one of none, ap, alzc, almac";
         c.adaptation = *a;
         return std::nullopt;
       }},
      {"stations", integer(c.stations)},
      {"dcf_stations", integer(c.dcf_stations)},
      {"length", integer(c.length)},
      {"max_length", integer(c.max_length)},
      {"ap_initial_length", integer(c.ap_initial_length)},
      {"beta", real(c.beta)},
      {"gamma",
       [&](const std::string& v) -> std::optional<std::string> {
         if (v == "auto") {
           c.gamma.reset();
           return std::nullopt;
         }
         const auto d = parse_double(v);
         if (!d) return "expected a number or auto";
         c.gamma = *d;
         return std::nullopt;
       }},
      {"traffic",
       [&](const std::string& v) -> std::optional<std::string> {
         if (v == "saturated")
           c.traffic = TrafficModel::Mode::Saturated;
         else if (v == "poisson")
           c.traffic = TrafficModel::Mode::Poisson;
         else
           return "one of saturated, poisson";
         return std::nullopt;
       }},
      {"arrival_rate", real(c.arrival_rate_pps)},
      {"arrival_mbps",
       [&](const std::string& v) -> std::optional<std::string> {
         const auto d = parse_double(v);
         if (!d || *d < 0.0) return "expected a number >= 0";
         arrival_mbps = *d;
         return std::nullopt;
       }},
      {"queue_capacity", integer(c.queue_capacity)},
      {"error_rate", real(c.error_rate)},
      {"horizon", real(c.horizon)},
      {"horizon_unit",
       [&](const std::string& v) -> std::optional<std::string> {
         if (v == "seconds")
           c.horizon_unit = Horizon::Unit::Seconds;
         else if (v == "slots")
           c.horizon_unit = Horizon::Unit::Slots;
         else
           return "one of seconds, slots";
         return std::nullopt;
       }},
      {"cap_schedules",
       [&](const std::string& v) -> std::optional<std::string> {
         const auto d = parse_int<std::int64_t>(v);
         if (!d) return "expected an integer";
         c.cap_schedules = *d;
         return std::nullopt;
       }},
      {"replications", integer(c.replications)},
      {"seed",
       [&](const std::string& v) -> std::optional<std::string> {
         const auto d = parse_int<std::uint64_t>(v);
         if (!d) return "expected an unsigned integer";
         c.seed = *d;
         return std::nullopt;
       }},
      {"join_stations", integer(c.join_stations)},
      {"join_time", real(c.join_time_s)},
      {"sweep",
       [&](const std::string& v) -> std::optional<std::string> {
         for (auto k : {SweepKind::None, SweepKind::Beta, SweepKind::Gamma, SweepKind::Stations, SweepKind::ErrorRate})
           if (v == to_string(k)) {
             c.sweep = k;
             return std::nullopt;
           }
         return "one of none, beta, gamma, stations, error_rate";
       }},
      {"sweep_values",
       [&](const std::string& v) -> std::optional<std::string> {
         c.sweep_values.clear();
         std::istringstream is(v);
         for (std::string item; std::getline(is, item, ',');) {
           const auto d = parse_double(trim(item));
           if (!d) return "expected comma-separated numbers";
           c.sweep_values.push_back(*d);
         }
         return std::nullopt;
       }},
      {"ftable",
       [&](const std::string& v) -> std::optional<std::string> {
         c.ftable_path = v;
         return std::nullopt;
       }},
      {"payload_bytes", integer(c.phy.payload_bytes)},
      {"phy_header_bytes", integer(c.phy.phy_header_bytes)},
      {"mac_header_bytes", integer(c.phy.mac_header_bytes)},
      {"data_rate", real(c.phy.data_rate_bps)},
      {"basic_rate", real(c.phy.basic_rate_bps)},
      {"sifs", real(c.phy.sifs_us)},
      {"difs", real(c.phy.difs_us)},
      {"sigma", real(c.phy.sigma_us)},
  };

  std::map<std::string, int> key_line;
  std::istringstream is{std::string(text)};
  int line_no = 0;
  for (std::string line; std::getline(is, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      diags.push_back({line_no, body, "", "expected key = value"});
      continue;
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      diags.push_back({line_no, key, value, "unknown key"});
      continue;
    }
    key_line[key] = line_no;
    if (auto err = it->second(value)) diags.push_back({line_no, key, value, *err});
  }
  if (arrival_mbps) c.arrival_rate_pps = *arrival_mbps * 1e6 / (8.0 * c.phy.payload_bytes);

  auto range = check_config(c);
  for (auto& d : range)
    if (auto k = key_line.find(d.key); k != key_line.end()) d.line = k->second;
  diags.insert(diags.end(), range.begin(), range.end());
  if (diags.empty()) result.config = std::move(c);
  return result;
}

std::string to_text(const SimConfig& c) {
  std::ostringstream os;
  os << "protocol = " << to_string(c.protocol) << '\n'
     << "adaptation = " << to_string(c.adaptation) << '\n'
     << "stations = " << c.stations << '\n'
     << "dcf_stations = " << c.dcf_stations << '\n'
     << "length = " << c.length << '\n'
     << "max_length = " << c.max_length << '\n'
     << "ap_initial_length = " << c.ap_initial_length << '\n'
     << "beta = " << fmt(c.beta) << '\n'
     << "gamma = " << (c.gamma ? fmt(*c.gamma) : std::string("auto")) << '\n'
     << "traffic = " << (c.traffic == TrafficModel::Mode::Saturated ? "saturated" : "poisson") << '\n'
     << "arrival_rate = " << fmt(c.arrival_rate_pps) << '\n'
     << "queue_capacity = " << c.queue_capacity << '\n'
     << "error_rate = " << fmt(c.error_rate) << '\n'
     << "horizon = " << fmt(c.horizon) << '\n'
     << "horizon_unit = " << (c.horizon_unit == Horizon::Unit::Seconds ? "seconds" : "slots") << '\n'
     << "cap_schedules = " << c.cap_schedules << '\n'
     << "replications = " << c.replications << '\n'
     << "seed = " << c.seed << '\n'
     << "join_stations = " << c.join_stations << '\n'
     << "join_time = " << fmt(c.join_time_s) << '\n'
     << "sweep = " << to_string(c.sweep) << '\n'
     << "sweep_values = ";
  for (std::size_t i = 0; i < c.sweep_values.size(); ++i) os << (i ? "," : "") << fmt(c.sweep_values[i]);
  os << '\n'
     << "ftable = " << c.ftable_path << '\n'
     << "payload_bytes = " << c.phy.payload_bytes << '\n'
     << "phy_header_bytes = " << c.phy.phy_header_bytes << '\n'
     << "mac_header_bytes = " << c.phy.mac_header_bytes << '\n'
     << "data_rate = " << fmt(c.phy.data_rate_bps) << '\n'
     << "basic_rate = " << fmt(c.phy.basic_rate_bps) << '\n'
     << "sifs = " << fmt(c.phy.sifs_us) << '\n'
     << "difs = " << fmt(c.phy.difs_us) << '\n'
     << "sigma = " << fmt(c.phy.sigma_us) << '\n';
  return os.str();
}

std::uint64_t config_hash(const SimConfig& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : to_text(config)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

NetworkConfig network_config(const SimConfig& c) {
  NetworkConfig net;
  net.phy = c.phy;
  net.traffic.mode = c.traffic;
  net.traffic.arrival_rate_pps = c.arrival_rate_pps;
  net.traffic.queue_capacity = c.queue_capacity;
  net.channel.frame_error_rate = c.error_rate;
  net.base_length = c.length;
  net.max_length = c.max_length;
  net.ap_initial_length = c.ap_initial_length;
  if (!c.ftable_path.empty()) {
    std::ifstream in(c.ftable_path);
    if (!in) throw std::runtime_error("cannot open f-table '" + c.ftable_path + "'");
    net.ftable = std::make_shared<const FTable>(FTable::read_csv(in));
  }
  return net;
}

std::vector<StationSpec> population(const SimConfig& c, int stations, int dcf_stations) {
  std::vector<StationSpec> out;
  StationSpec spec;
  spec.protocol = c.protocol;
  spec.adaptation = c.adaptation;
  spec.schedule_length = c.length;
  spec.params = c.protocol_params();
  if (c.protocol == ProtocolKind::Lzc && c.adaptation == AdaptationKind::None && !c.gamma && stations <= c.length)
    spec.params.gamma = 1.0 / (c.length - stations + 2);
  out.assign(stations, spec);
  StationSpec dcf;
  dcf.protocol = ProtocolKind::Dcf;
  out.insert(out.end(), dcf_stations, dcf);
  return out;
}

}  // namespace cfmac

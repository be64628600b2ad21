#include "cfmac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace cfmac {

// ---- convergence -------------------------------------------------------------

AlignedConvergenceDetector::AlignedConvergenceDetector(int stations, int length, std::uint64_t first_slot,
                                                       double start_us)
    : stations_(stations), length_(length), first_slot_(first_slot), start_us_(start_us),
      schedule_start_us_(start_us) {
  if (stations < 1 || length < 1) throw std::invalid_argument("detector needs N >= 1 and C >= 1");
}

bool AlignedConvergenceDetector::feed(const SlotOutcome& outcome, std::uint64_t slot_index, double slot_start_us) {
  if (result_.converged()) return true;
  const auto offset = static_cast<std::int64_t>(slot_index - first_slot_);
  if (offset % length_ == 0) {
    schedule_ = offset / length_;
    schedule_start_us_ = slot_start_us;
    clean_successes_ = 0;
    dirty_ = false;
    successes_at_schedule_start_ = successes_.size();
  }
  switch (outcome.kind) {
    case SlotKind::Idle: break;
    case SlotKind::Success:
      ++clean_successes_;
      if (keep_successes_) successes_.push_back(outcome.transmitters.front());
      break;
    case SlotKind::Collision:
    case SlotKind::Error: dirty_ = true; break;
  }
  if (offset % length_ == length_ - 1 && !dirty_ && clean_successes_ == stations_) {
    result_.schedules = schedule_;
    result_.seconds = (schedule_start_us_ - start_us_) * 1e-6;
    successes_.resize(successes_at_schedule_start_);
  }
  return result_.converged();
}

ConvergenceResult detect_convergence(const Trace& trace, int stations, int length) {
  if (trace.empty()) return {};
  AlignedConvergenceDetector detector(stations, length, trace.front().slot_index, trace.front().start_us);
  for (const auto& row : trace)
    if (detector.feed(row.outcome, row.slot_index, row.start_us)) break;
  return detector.result();
}

ConvergenceResult detect_convergence_events(const EventLog& events, int stations) {
  std::map<std::uint64_t, std::vector<int>> slots_by_schedule;
  for (const auto& e : events) slots_by_schedule[e.schedule_index].push_back(e.chosen_slot);
  for (const auto& [index, slots] : slots_by_schedule) {
    if (static_cast<int>(slots.size()) != stations) continue;
    std::set<int> distinct(slots.begin(), slots.end());
    if (static_cast<int>(distinct.size()) == stations) return {static_cast<std::int64_t>(index), 0.0};
  }
  return {};
}

// ---- fairness, collisions, throughput ----------------------------------------

std::optional<double> jain_index(std::span<const int> sequence, int stations, int m) {
  if (stations < 1 || m < 1) throw std::invalid_argument("jain_index needs N >= 1 and m >= 1");
  const std::size_t w = static_cast<std::size_t>(m) * stations;
  const std::size_t windows = sequence.size() / w;
  if (windows == 0) return std::nullopt;
  std::vector<double> nu(stations);
  double total = 0.0;
  for (std::size_t k = 0; k < windows; ++k) {
    std::fill(nu.begin(), nu.end(), 0.0);
    for (std::size_t j = k * w; j < (k + 1) * w; ++j) {
      const int id = sequence[j];
      if (id < 1 || id > stations) throw std::out_of_range("station id outside 1..N in success sequence");
      nu[id - 1] += static_cast<double>(stations) / static_cast<double>(w);
    }
    double sum = 0.0, sum_sq = 0.0;
    for (double v : nu) {
      sum += v;
      sum_sq += v * v;
    }
    total += sum * sum / (stations * sum_sq);
  }
  return total / static_cast<double>(windows);
}

std::optional<double> collision_rate(const Trace& trace) {
  std::uint64_t attempts = 0, collided = 0;
  for (const auto& row : trace) {
    switch (row.outcome.kind) {
      case SlotKind::Idle: break;
      case SlotKind::Success:
      case SlotKind::Error: ++attempts; break;
      case SlotKind::Collision:
        attempts += row.outcome.transmitters.size();
        collided += row.outcome.transmitters.size();
        break;
    }
  }
  if (attempts == 0) return std::nullopt;
  return static_cast<double>(collided) / static_cast<double>(attempts);
}

Throughput throughput(std::uint64_t delivered_packets, double elapsed_us, const PhyParams& phy) {
  if (!(elapsed_us > 0.0)) throw std::invalid_argument("throughput needs a positive elapsed time");
  const double bits = static_cast<double>(delivered_packets) * phy.payload_bytes * 8.0;
  Throughput t;
  t.mbps = bits / elapsed_us;  // bits per microsecond = Mbit/s
  t.normalised = bits / (phy.data_rate_bps * elapsed_us * 1e-6);
  return t;
}

Throughput throughput(const Trace& trace, const PhyParams& phy) {
  std::uint64_t packets = 0;
  double elapsed = 0.0;
  const double exchange = phy.success_duration_us(2) - phy.success_duration_us(1);
  for (const auto& row : trace) {
    elapsed += row.outcome.duration_us;
    if (row.outcome.kind != SlotKind::Success) continue;
    if (row.outcome.packets > 0) {
      packets += row.outcome.packets;
    } else {
      // Rows read back from CSV carry no packet count; recover it from the duration.
      const double m = (row.outcome.duration_us - phy.difs_us - phy.sigma_us) / exchange;
      packets += static_cast<std::uint64_t>(std::max(1.0, std::round(m)));
    }
  }
  return throughput(packets, elapsed, phy);
}

std::optional<double> access_delay(const StationStats& stats) {
  if (stats.delay_count == 0) return std::nullopt;
  return stats.delay_sum_us / static_cast<double>(stats.delay_count);
}

std::optional<double> access_delay(std::span<const StationStats> stats) {
  double sum = 0.0;
  std::uint64_t count = 0;
  for (const auto& s : stats) {
    sum += s.delay_sum_us;
    count += s.delay_count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.n = values.size();
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(ss / static_cast<double>(s.n - 1) / static_cast<double>(s.n));
  }
  s.ci_half_width = 1.96 * s.std_error;
  return s;
}

// ---- achievable rate -----------------------------------------------------------

double estimate_max_rho(const NetworkConfig& config, std::span<const StationSpec> stations, double lambda_pps,
                        double horizon_seconds, std::uint64_t seed) {
  if (lambda_pps <= 0.0) return 0.0;
  NetworkConfig cfg = config;
  cfg.traffic.mode = TrafficModel::Mode::Poisson;
  cfg.traffic.arrival_rate_pps = lambda_pps;
  cfg.record_trace = false;
  cfg.record_events = false;
  validate_population(cfg, stations);
  Network net(cfg, seed);
  for (const auto& spec : stations) net.add_station(spec);
  const double limit_us = horizon_seconds * 1e6;
  while (net.now_us() < limit_us) net.step();

  double worst = 0.0;
  for (const auto& st : net.stations()) {
    const auto service = access_delay(st.stats);
    if (st.stats.arrivals == 0) continue;
    // A station that never completed a packet is not keeping up.
    if (!service) return std::numeric_limits<double>::infinity();
    const double interarrival_us = net.now_us() / static_cast<double>(st.stats.arrivals);
    worst = std::max(worst, *service / interarrival_us);
  }
  return worst;
}

AchievableRate achievable_rate(const NetworkConfig& config, std::span<const StationSpec> stations,
                               const AchievableRateOptions& options) {
  double high = options.lambda_high_pps;
  if (high <= 0.0) {
    // Every station served once per schedule of successes bounds the rate.
    const double t_s = config.phy.success_duration_us(1) * 1e-6;
    high = 1.0 / (t_s * static_cast<double>(stations.size())) * 1.5;
  }
  AchievableRate result;
  double horizon = options.horizon_seconds;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    double lo = 0.0, hi = high;
    std::uint64_t probe = 0;
    const double rho_hi = estimate_max_rho(config, stations, hi, horizon, mix_seed(options.seed, probe++));
    if (rho_hi < 1.0) {
      result = {hi, rho_hi, horizon, true};
      return result;
    }
    double rho_lo_seen = 0.0;
    while (hi - lo > options.tolerance_pps) {
      const double mid = 0.5 * (lo + hi);
      const double rho = estimate_max_rho(config, stations, mid, horizon, mix_seed(options.seed, probe++));
      if (rho < 1.0) {
        lo = mid;
        rho_lo_seen = rho;
      } else {
        hi = mid;
      }
    }
    // A stable point must stay stable when re-estimated with fresh arrivals.
    const double check = lo > 0.0 ? estimate_max_rho(config, stations, lo, horizon, mix_seed(options.seed, probe++)) : 0.0;
    result = {lo, lo > 0.0 ? rho_lo_seen : 0.0, horizon, check < 1.0};
    if (result.monotone) return result;
    horizon *= 2.0;
  }
  return result;
}

}  // namespace cfmac

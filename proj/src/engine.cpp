#include "cfmac/engine.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace cfmac {

int StationHandle::backoff_counter() const {
  if (!protocol) return counter;
  const int s = protocol->current_slot();
  return s >= position ? s - position : protocol->schedule_length() - position + s;
}

int StationHandle::packets_per_access(int base_length) const {
  if (spec.adaptation == AdaptationKind::Mimd || spec.adaptation == AdaptationKind::Almac)
    return txop_packets(schedule_length(), base_length);
  return 1;
}

void validate_population(const NetworkConfig& config, std::span<const StationSpec> stations) {
  config.phy.validate();
  if (stations.empty()) throw std::invalid_argument("population: N must be >= 1");
  const double fer = config.channel.frame_error_rate;
  if (!(fer >= 0.0 && fer <= 1.0)) throw std::invalid_argument("error_rate must lie in [0,1]");
  if (config.traffic.mode == TrafficModel::Mode::Poisson) {
    if (!(config.traffic.arrival_rate_pps >= 0.0)) throw std::invalid_argument("arrival_rate must be >= 0");
    if (config.traffic.queue_capacity < 1) throw std::invalid_argument("queue_capacity must be >= 1");
  }
  for (const auto& s : stations) {
    if (s.protocol == ProtocolKind::Dcf) {
      const auto& d = s.params.dcf;
      if (d.cw_min < 1 || d.cw_max < d.cw_min || d.retry_limit < 1)
        throw std::invalid_argument("DCF: need 1 <= cw_min <= cw_max and retry_limit >= 1");
      if (s.adaptation != AdaptationKind::None) throw std::invalid_argument("DCF stations cannot adapt");
      continue;
    }
    if (s.schedule_length < 1) throw std::invalid_argument("schedule length C must be >= 1");
    if (s.protocol == ProtocolKind::Lmac && !(s.params.beta > 0.0 && s.params.beta < 1.0))
      throw std::invalid_argument("beta must lie in (0,1), got " + std::to_string(s.params.beta));
    if (s.protocol == ProtocolKind::Lzc && !(s.params.gamma > 0.0 && s.params.gamma < 1.0))
      throw std::invalid_argument("gamma must lie in (0,1), got " + std::to_string(s.params.gamma));
    switch (s.adaptation) {
      case AdaptationKind::None: break;
      case AdaptationKind::ApAnnounced:
        if (config.ap_initial_length < 1) throw std::invalid_argument("announced length must be >= 1");
        break;
      case AdaptationKind::Mimd:
        if (s.protocol != ProtocolKind::Lzc && s.protocol != ProtocolKind::Zc)
          throw std::invalid_argument("MIMD on idle slots needs ZC or L-ZC stations");
        if (!is_power_of_two_multiple(config.max_length, config.base_length))
          throw std::invalid_argument("max_length must be base_length times a power of two");
        break;
      case AdaptationKind::Almac:
        if (s.protocol != ProtocolKind::Lmac) throw std::invalid_argument("A-L-MAC needs L-MAC stations");
        if (!config.ftable || !config.ftable->covers(config.base_length))
          throw std::invalid_argument("A-L-MAC needs an f-table covering the base length");
        if (!is_power_of_two_multiple(config.max_length, config.base_length))
          throw std::invalid_argument("max_length must be base_length times a power of two");
        break;
    }
  }
}

Network::Network(NetworkConfig config, std::uint64_t seed)
    : config_(std::move(config)), seed_(seed), channel_rng_(make_stream(seed, 0, StreamKind::Channel)) {
  config_.phy.validate();
}

std::optional<int> Network::announced_length() const {
  if (!ap_) return std::nullopt;
  return ap_->length;
}

int Network::add_station(const StationSpec& spec) {
  validate_population(config_, std::span<const StationSpec>(&spec, 1));
  StationHandle st;
  st.id = static_cast<int>(stations_.size()) + 1;
  st.spec = spec;
  st.join_slot = slot_index_;
  st.join_time_us = now_us_;
  st.mac_rng = make_stream(seed_, static_cast<std::uint64_t>(st.id), StreamKind::Protocol);
  st.traffic_rng = make_stream(seed_, static_cast<std::uint64_t>(st.id), StreamKind::Traffic);
  st.saturated = config_.traffic.mode == TrafficModel::Mode::Saturated;
  st.hol_since_us = now_us_;
  if (!st.saturated) {
    const double rate = config_.traffic.arrival_rate_pps;
    st.next_arrival_us = rate > 0.0
                             ? now_us_ + std::exponential_distribution<double>(rate)(st.traffic_rng) * 1e6
                             : std::numeric_limits<double>::infinity();
  }

  if (spec.protocol == ProtocolKind::Dcf) {
    st.dcf = init_dcf(spec.params.dcf);
    st.counter = dcf_draw_counter(st.dcf, st.mac_rng);
  } else {
    int length = spec.schedule_length;
    const AdaptLimits limits{config_.base_length, config_.max_length};
    switch (spec.adaptation) {
      case AdaptationKind::None: break;
      case AdaptationKind::ApAnnounced:
        if (!ap_) ap_ = ApState{config_.ap_initial_length, 1, ObservationWindow(config_.ap_initial_length)};
        length = ap_->length;
        break;
      case AdaptationKind::Mimd:
        length = config_.base_length;
        st.alzc.emplace(limits);
        break;
      case AdaptationKind::Almac:
        length = config_.base_length;
        st.almac.emplace(limits, config_.ftable.get(), config_.probe_every);
        break;
    }
    st.protocol = init_protocol(spec.protocol, length, spec.params, st.mac_rng);
    st.window.rebuild(length);
  }
  stations_.push_back(std::move(st));
  at_slot_.resize(stations_.size());
  return stations_.back().id;
}

void Network::deliver_arrivals(StationHandle& st) {
  const double rate = config_.traffic.arrival_rate_pps;
  while (st.next_arrival_us <= now_us_) {
    ++st.stats.arrivals;
    if (static_cast<int>(st.queue.size()) < config_.traffic.queue_capacity)
      st.queue.push_back(st.next_arrival_us);
    else
      ++st.stats.queue_drops;
    st.next_arrival_us += std::exponential_distribution<double>(rate)(st.traffic_rng) * 1e6;
  }
}

void Network::complete_packets(StationHandle& st, unsigned packets, double done_us) {
  st.stats.delivered_packets += packets;
  if (st.saturated) {
    st.stats.delay_sum_us += packets * (done_us - st.hol_since_us);
    st.stats.delay_count += packets;
  } else {
    for (unsigned k = 0; k < packets && !st.queue.empty(); ++k) {
      const double hol = std::max(st.queue.front(), st.hol_since_us);
      st.stats.delay_sum_us += done_us - hol;
      ++st.stats.delay_count;
      st.queue.pop_front();
    }
  }
  st.hol_since_us = done_us;
}

void Network::drop_head(StationHandle& st, double now_us) {
  ++st.stats.retry_drops;
  if (!st.saturated && !st.queue.empty()) st.queue.pop_front();
  st.hol_since_us = now_us;
}

void Network::apply_length(StationHandle& st, int new_length) {
  st.protocol->resize(new_length, map_slot(st.protocol->current_slot(), new_length));
}

void Network::end_schedule(StationHandle& st) {
  const int length = st.protocol->schedule_length();
  if (config_.record_events)
    events_.push_back({st.id, st.schedule_index, st.protocol->current_slot(), st.own, length});

  st.window.idle_positions(idle_scratch_);
  st.protocol->on_schedule_end(st.own, idle_scratch_, st.mac_rng);

  switch (st.spec.adaptation) {
    case AdaptationKind::None: break;
    case AdaptationKind::ApAnnounced:
      if (ap_->length != length) apply_length(st, ap_->length);
      break;
    case AdaptationKind::Mimd: {
      const int next = st.alzc->on_schedule_end(length, st.window.idle_count(), st.window.busy_count());
      if (next != length) apply_length(st, next);
      break;
    }
    case AdaptationKind::Almac: {
      const auto decision = st.almac->on_schedule_end(length, st.own);
      switch (decision.action) {
        case AlmacAction::Keep: break;
        case AlmacAction::Double: apply_length(st, decision.new_length); break;
        case AlmacAction::BeginProbe:
          st.pre_probe = st.protocol->clone();
          apply_length(st, decision.new_length);
          break;
        case AlmacAction::CommitProbe: st.pre_probe.reset(); break;
        case AlmacAction::RevertProbe:
          // The probe schedule moved the phase origin by `length` slots.
          st.protocol = std::move(st.pre_probe);
          st.protocol->shift_phase(length);
          break;
      }
      break;
    }
  }

  const int next_length = st.protocol->schedule_length();
  if (next_length != st.window.length())
    st.window.rebuild(next_length);
  else
    st.window.clear();
  st.position = 1;
  st.own = Feedback::Success;
  ++st.schedule_index;
}

void Network::ap_observe(bool busy) {
  ap_->window.record(ap_->position, busy);
  if (++ap_->position > ap_->length) {
    ap_->length = ap_adapt(ap_->length, ap_->window.idle_count());
    ap_->window.rebuild(ap_->length);
    ap_->position = 1;
  }
}

const SlotOutcome& Network::step() {
  auto& out = last_;
  out.transmitters.clear();
  out.packets = 0;

  // at_slot_: 0 = not its slot, 1 = its slot without a packet, 2 = transmits.
  const std::size_t n = stations_.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto& st = stations_[i];
    if (!st.saturated) deliver_arrivals(st);
    const bool at = st.protocol ? st.position == st.protocol->current_slot() : st.counter == 0;
    at_slot_[i] = at ? (st.has_packet() ? 2 : 1) : 0;
    if (at_slot_[i] == 2) out.transmitters.push_back(st.id);
  }

  if (out.transmitters.empty()) {
    out.kind = SlotKind::Idle;
  } else if (out.transmitters.size() >= 2) {
    out.kind = SlotKind::Collision;
  } else {
    const double fer = config_.channel.frame_error_rate;
    out.kind = (fer > 0.0 && bernoulli(channel_rng_, fer)) ? SlotKind::Error : SlotKind::Success;
    if (out.kind == SlotKind::Success) {
      const auto& tx = stations_[out.transmitters.front() - 1];
      unsigned packets = static_cast<unsigned>(tx.packets_per_access(config_.base_length));
      if (!tx.saturated) packets = std::min<unsigned>(packets, static_cast<unsigned>(tx.queue.size()));
      out.packets = packets;
    }
  }
  out.duration_us = slot_duration(out.kind, config_.phy, std::max(1u, out.packets));
  const bool busy = out.kind != SlotKind::Idle;
  const double done_us = now_us_ + out.duration_us;

  if (ap_) ap_observe(busy);

  for (std::size_t i = 0; i < n; ++i) {
    auto& st = stations_[i];
    const bool tx = at_slot_[i] == 2;
    const bool success = tx && out.kind == SlotKind::Success;
    if (tx) {
      ++st.stats.attempts;
      if (success) {
        ++st.stats.successful_slots;
        complete_packets(st, out.packets, done_us);
      } else {
        ++st.stats.failed_attempts;
      }
    }
    if (st.protocol) {
      st.window.record(st.position, busy);
      if (at_slot_[i] != 0) st.own = tx ? (success ? Feedback::Success : Feedback::Failure)
                                       : (busy ? Feedback::Failure : Feedback::Success);
      if (++st.position > st.protocol->schedule_length()) end_schedule(st);
    } else if (tx) {
      const auto decision =
          dcf_update(st.dcf, success ? Feedback::Success : Feedback::Failure, st.spec.params.dcf, st.mac_rng);
      st.counter = decision.counter;
      if (decision.dropped) drop_head(st, done_us);
      if (config_.record_events)
        events_.push_back({st.id, st.stats.attempts - 1, decision.counter,
                           success ? Feedback::Success : Feedback::Failure, st.dcf.cw});
    } else if (st.counter > 0) {
      --st.counter;
    }
  }

  if (config_.record_trace) trace_.push_back({slot_index_, now_us_, out});
  now_us_ = done_us;
  ++slot_index_;
  return out;
}

RunRecord run(NetworkConfig config, std::span<const StationSpec> stations, Horizon horizon, std::uint64_t seed) {
  validate_population(config, stations);
  if (!(horizon.amount > 0.0)) throw std::invalid_argument("horizon must be positive");
  config.record_trace = true;
  config.record_events = true;
  Network net(std::move(config), seed);
  for (const auto& spec : stations) net.add_station(spec);
  if (horizon.unit == Horizon::Unit::Slots) {
    const auto slots = static_cast<std::uint64_t>(horizon.amount);
    while (net.slot_index() < slots) net.step();
  } else {
    const double limit_us = horizon.amount * 1e6;
    while (net.now_us() < limit_us) net.step();
  }
  RunRecord record;
  record.elapsed_us = net.now_us();
  for (const auto& st : net.stations()) record.stats.push_back(st.stats);
  record.trace = net.take_trace();
  record.events = net.take_events();
  return record;
}

}  // namespace cfmac

#include "cfmac/protocols.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cfmac {

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Dcf: return "dcf";
    case ProtocolKind::Lbeb: return "lbeb";
    case ProtocolKind::Zc: return "zc";
    case ProtocolKind::Lzc: return "lzc";
    case ProtocolKind::Lmac: return "lmac";
  }
  return "?";
}

std::optional<ProtocolKind> parse_protocol(std::string_view name) {
  for (auto kind : {ProtocolKind::Dcf, ProtocolKind::Lbeb, ProtocolKind::Zc, ProtocolKind::Lzc,
                    ProtocolKind::Lmac})
    if (name == to_string(kind)) return kind;
  return std::nullopt;
}

void lmac_update(LmacState& state, Feedback outcome) {
  auto& p = state.p;
  const int s = state.slot - 1;
  if (outcome == Feedback::Success) {
    std::fill(p.begin(), p.end(), 0.0);
    p[s] = 1.0;
    return;
  }
  const int length = state.length();
  if (length == 1) return;
  const double spread = (1.0 - state.beta) / (length - 1);
  for (int j = 0; j < length; ++j) p[j] = state.beta * p[j] + (j == s ? 0.0 : spread);
}

int lmac_select(std::span<const double> p, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  int last_positive = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] <= 0.0) continue;
    acc += p[j];
    last_positive = static_cast<int>(j) + 1;
    if (u < acc) return last_positive;
  }
  // Rounding left u above the accumulated mass.
  return last_positive;
}

int lzc_update(const LzcState& state, Feedback outcome, std::span<const int> idle_positions,
               Rng& rng) {
  if (outcome == Feedback::Success || idle_positions.empty()) return state.slot;
  if (bernoulli(rng, state.gamma)) return state.slot;
  const int pick = uniform_int(rng, 0, static_cast<int>(idle_positions.size()) - 1);
  return idle_positions[pick];
}

int zc_update(int slot, Feedback outcome, std::span<const int> idle_positions, Rng& rng) {
  if (outcome == Feedback::Success || idle_positions.empty()) return slot;
  const int pick = uniform_int(rng, 0, static_cast<int>(idle_positions.size()));
  return pick == 0 ? slot : idle_positions[pick - 1];
}

int lbeb_update(int slot, Feedback outcome, int length, Rng& rng) {
  if (outcome == Feedback::Success) return slot;
  return uniform_int(rng, 1, length);
}

std::vector<std::pair<int, double>> lzc_next_distribution(int slot, std::span<const int> idle_positions,
                                                          double gamma) {
  if (idle_positions.empty()) return {{slot, 1.0}};
  std::vector<std::pair<int, double>> dist{{slot, gamma}};
  const double each = (1.0 - gamma) / static_cast<double>(idle_positions.size());
  for (int idle : idle_positions) dist.emplace_back(idle, each);
  return dist;
}

std::vector<std::pair<int, double>> zc_next_distribution(int slot, std::span<const int> idle_positions) {
  const double each = 1.0 / static_cast<double>(idle_positions.size() + 1);
  std::vector<std::pair<int, double>> dist{{slot, each}};
  for (int idle : idle_positions) dist.emplace_back(idle, each);
  return dist;
}

DcfState init_dcf(const DcfParams& params) { return DcfState{params.cw_min, 0}; }

int dcf_draw_counter(const DcfState& state, Rng& rng) { return uniform_int(rng, 0, state.cw - 1); }

DcfDecision dcf_update(DcfState& state, Feedback outcome, const DcfParams& params, Rng& rng) {
  DcfDecision decision;
  if (outcome == Feedback::Success) {
    state.cw = params.cw_min;
    state.retries = 0;
  } else if (++state.retries >= params.retry_limit) {
    decision.dropped = true;
    state.cw = params.cw_min;
    state.retries = 0;
  } else {
    state.cw = std::min(2 * state.cw, params.cw_max);
  }
  decision.counter = dcf_draw_counter(state, rng);
  return decision;
}

int backoff_from_slots(int s_n, int s_n1, int length) {
  if (length < 1 || s_n < 1 || s_n > length || s_n1 < 1 || s_n1 > length)
    throw std::out_of_range("slot outside 1.." + std::to_string(length));
  return length - s_n + s_n1;
}

int map_slot(int slot, int new_length) { return (slot - 1) % new_length + 1; }

namespace {
int rotate_slot(int slot, int length, int offset) {
  const int r = ((slot - 1 - offset) % length + length) % length;
  return r + 1;
}
}  // namespace

// ---- L-BEB ------------------------------------------------------------------

LbebProtocol::LbebProtocol(int length, Rng& rng) : slot_(uniform_int(rng, 1, length)), length_(length) {}

int LbebProtocol::on_schedule_end(Feedback own, std::span<const int>, Rng& rng) {
  slot_ = lbeb_update(slot_, own, length_, rng);
  return slot_;
}

void LbebProtocol::resize(int new_length, int slot) {
  length_ = new_length;
  slot_ = slot;
}

void LbebProtocol::shift_phase(int offset) { slot_ = rotate_slot(slot_, length_, offset); }

std::unique_ptr<ScheduleProtocol> LbebProtocol::clone() const {
  return std::make_unique<LbebProtocol>(*this);
}

// ---- ZC / L-ZC ----------------------------------------------------------------

LzcProtocol::LzcProtocol(int length, std::optional<double> gamma, Rng& rng)
    : slot_(uniform_int(rng, 1, length)), length_(length), gamma_(gamma) {}

int LzcProtocol::on_schedule_end(Feedback own, std::span<const int> idle_positions, Rng& rng) {
  slot_ = gamma_ ? lzc_update(LzcState{slot_, length_, *gamma_}, own, idle_positions, rng)
                 : zc_update(slot_, own, idle_positions, rng);
  return slot_;
}

void LzcProtocol::resize(int new_length, int slot) {
  length_ = new_length;
  slot_ = slot;
}

void LzcProtocol::shift_phase(int offset) { slot_ = rotate_slot(slot_, length_, offset); }

std::unique_ptr<ScheduleProtocol> LzcProtocol::clone() const { return std::make_unique<LzcProtocol>(*this); }

// ---- L-MAC ----------------------------------------------------------------------

LmacProtocol::LmacProtocol(int length, double beta, Rng& rng) {
  state_.p.assign(length, 1.0 / length);
  state_.beta = beta;
  state_.slot = lmac_select(state_.p, rng);
}

int LmacProtocol::on_schedule_end(Feedback own, std::span<const int>, Rng& rng) {
  lmac_update(state_, own);
  state_.slot = own == Feedback::Success ? state_.slot : lmac_select(state_.p, rng);
  return state_.slot;
}

void LmacProtocol::resize(int new_length, int slot) {
  state_.p.assign(new_length, 1.0 / new_length);
  state_.slot = slot;
}

void LmacProtocol::shift_phase(int offset) {
  const int length = state_.length();
  std::vector<double> rotated(length);
  for (int j = 1; j <= length; ++j) rotated[rotate_slot(j, length, offset) - 1] = state_.p[j - 1];
  state_.p = std::move(rotated);
  state_.slot = rotate_slot(state_.slot, length, offset);
}

std::unique_ptr<ScheduleProtocol> LmacProtocol::clone() const { return std::make_unique<LmacProtocol>(*this); }

std::unique_ptr<ScheduleProtocol> init_protocol(ProtocolKind kind, int length, const ProtocolParams& params,
                                                Rng& rng) {
  if (length < 1) throw std::invalid_argument("schedule length must be >= 1");
  switch (kind) {
    case ProtocolKind::Lbeb: return std::make_unique<LbebProtocol>(length, rng);
    case ProtocolKind::Zc: return std::make_unique<LzcProtocol>(length, std::nullopt, rng);
    case ProtocolKind::Lzc:
      if (!(params.gamma > 0.0 && params.gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
      return std::make_unique<LzcProtocol>(length, params.gamma, rng);
    case ProtocolKind::Lmac:
      if (!(params.beta > 0.0 && params.beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
      return std::make_unique<LmacProtocol>(length, params.beta, rng);
    case ProtocolKind::Dcf: break;
  }
  throw std::invalid_argument("DCF is not schedule based; use init_dcf");
}

}  // namespace cfmac

#pragma once

// Per-station slot selection rules.
//
// Slots are 1-based positions within a station's own schedule of length C.
// Schedule-based protocols (L-BEB, ZC, L-ZC, L-MAC) pick a slot once per
// schedule; DCF draws a random backoff counter after every attempt.

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "cfmac/rng.hpp"

namespace cfmac {

enum class ProtocolKind { Dcf, Lbeb, Zc, Lzc, Lmac };

std::string_view to_string(ProtocolKind kind);
std::optional<ProtocolKind> parse_protocol(std::string_view name);
inline bool is_schedule_based(ProtocolKind kind) { return kind != ProtocolKind::Dcf; }

/// Outcome of a station's own slot: a transmission that succeeded/failed, or
/// a virtual observation (no packet) of an idle/busy slot.
enum class Feedback { Success, Failure };

struct DcfParams {
  int cw_min = 32;
  int cw_max = 1024;
  // A frame is dropped after this many failed attempts.
  int retry_limit = 7;
};

struct ProtocolParams {
  double beta = 0.95;
  double gamma = 0.5;
  DcfParams dcf;
};

struct LmacState {
  std::vector<double> p;
  int slot = 1;
  double beta = 0.95;
  int length() const { return static_cast<int>(p.size()); }
};

struct LzcState {
  int slot = 1;
  int length = 1;
  double gamma = 0.5;
};

struct DcfState {
  int cw = 32;
  int retries = 0;
};

struct DcfDecision {
  int counter = 0;
  bool dropped = false;
};

/// Learning update of the slot probabilities after the outcome in slot
/// `state.slot`. Success collapses p to a point mass; failure scales every
/// entry by beta and spreads 1 - beta over the other slots.
void lmac_update(LmacState& state, Feedback outcome);

/// Draw a 1-based slot with probability p[j-1].
int lmac_select(std::span<const double> p, Rng& rng);

/// L-ZC: after a failure stay with probability gamma, otherwise move to one
/// of the idle positions uniformly. With no idle positions the station stays.
int lzc_update(const LzcState& state, Feedback outcome, std::span<const int> idle_positions,
               Rng& rng);

/// ZC: after a failure choose uniformly among the current slot and the idle
/// positions.
int zc_update(int slot, Feedback outcome, std::span<const int> idle_positions, Rng& rng);

/// L-BEB: keep the slot on success, redraw uniformly over 1..C on failure.
int lbeb_update(int slot, Feedback outcome, int length, Rng& rng);

/// Next-slot distributions used to compare ZC with L-ZC exactly.
std::vector<std::pair<int, double>> lzc_next_distribution(int slot, std::span<const int> idle_positions,
                                                          double gamma);
std::vector<std::pair<int, double>> zc_next_distribution(int slot, std::span<const int> idle_positions);

/// Binary exponential backoff. The returned counter is uniform in [0, CW-1].
DcfDecision dcf_update(DcfState& state, Feedback outcome, const DcfParams& params, Rng& rng);
DcfState init_dcf(const DcfParams& params);
/// Counter for a fresh frame at the current contention window.
int dcf_draw_counter(const DcfState& state, Rng& rng);

/// MAC slots between a transmission in slot s_n of one schedule and one in
/// slot s_n1 of the next: C - s_n + s_n1.
int backoff_from_slots(int s_n, int s_n1, int length);

/// Behaviour shared by the schedule-based protocols.
class ScheduleProtocol {
 public:
  virtual ~ScheduleProtocol() = default;

  virtual ProtocolKind kind() const = 0;
  virtual int current_slot() const = 0;
  virtual int schedule_length() const = 0;

  /// Called once the station's schedule is complete. `own` is the outcome of
  /// its slot, `idle_positions` the idle positions seen in the schedule.
  /// Returns the slot for the next schedule.
  virtual int on_schedule_end(Feedback own, std::span<const int> idle_positions, Rng& rng) = 0;

  /// Switch to a new schedule length at a phase boundary, occupying `slot`.
  virtual void resize(int new_length, int slot) = 0;

  /// Rotate the schedule origin forward by `offset` positions so that the
  /// station keeps transmitting at the same point of the medium.
  virtual void shift_phase(int offset) = 0;

  virtual std::unique_ptr<ScheduleProtocol> clone() const = 0;
};

class LbebProtocol final : public ScheduleProtocol {
 public:
  LbebProtocol(int length, Rng& rng);

  ProtocolKind kind() const override { return ProtocolKind::Lbeb; }
  int current_slot() const override { return slot_; }
  int schedule_length() const override { return length_; }
  int on_schedule_end(Feedback own, std::span<const int> idle_positions, Rng& rng) override;
  void resize(int new_length, int slot) override;
  void shift_phase(int offset) override;
  std::unique_ptr<ScheduleProtocol> clone() const override;

 private:
  int slot_;
  int length_;
};

/// L-ZC, or ZC when constructed without a fixed gamma.
class LzcProtocol final : public ScheduleProtocol {
 public:
  LzcProtocol(int length, std::optional<double> gamma, Rng& rng);

  ProtocolKind kind() const override { return gamma_ ? ProtocolKind::Lzc : ProtocolKind::Zc; }
  int current_slot() const override { return slot_; }
  int schedule_length() const override { return length_; }
  int on_schedule_end(Feedback own, std::span<const int> idle_positions, Rng& rng) override;
  void resize(int new_length, int slot) override;
  void shift_phase(int offset) override;
  std::unique_ptr<ScheduleProtocol> clone() const override;

  std::optional<double> gamma() const { return gamma_; }

 private:
  int slot_;
  int length_;
  std::optional<double> gamma_;
};

class LmacProtocol final : public ScheduleProtocol {
 public:
  LmacProtocol(int length, double beta, Rng& rng);

  ProtocolKind kind() const override { return ProtocolKind::Lmac; }
  int current_slot() const override { return state_.slot; }
  int schedule_length() const override { return state_.length(); }
  int on_schedule_end(Feedback own, std::span<const int> idle_positions, Rng& rng) override;
  /// Resets p to uniform at the new length.
  void resize(int new_length, int slot) override;
  void shift_phase(int offset) override;
  std::unique_ptr<ScheduleProtocol> clone() const override;

  const LmacState& state() const { return state_; }

 private:
  LmacState state_;
};

/// Fresh protocol instance with a uniformly drawn initial slot. Rejects DCF
/// (see init_dcf) and beta/gamma outside (0,1).
std::unique_ptr<ScheduleProtocol> init_protocol(ProtocolKind kind, int length,
                                                const ProtocolParams& params, Rng& rng);

/// Map a 1-based slot onto a schedule of a different length, keeping its
/// offset from the phase origin where possible: ((slot - 1) mod length) + 1.
int map_slot(int slot, int new_length);

}  // namespace cfmac

#pragma once

// Schedule-length control.
//
// Three schemes:
//  * AP-announced: one length for the whole network, moved by +/-1 from the
//    idle count of each schedule (ap_adapt).
//  * MIMD on idle positions for ZC/L-ZC stations (AlzcAdapter).
//  * MIMD on own-slot failures at f(C_i)-schedule checkpoints, with
//    occasional one-schedule probes at C_i/2, for L-MAC (AlmacAdapter).
// Decentralised lengths are always base * 2^k so schedules of different
// stations stay phase-locked, and a station at C_i sends C_i/base packets
// per access (TXOP) to keep long-run goodput equal.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>

#include "cfmac/protocols.hpp"

namespace cfmac {

enum class AdaptationKind { None, ApAnnounced, Mimd, Almac };

std::string_view to_string(AdaptationKind kind);
std::optional<AdaptationKind> parse_adaptation(std::string_view name);

/// Network-wide length update: full schedule -> C+1, two or more idle slots
/// -> C-1 (never below 1), otherwise unchanged.
int ap_adapt(int length, int idle_count);

/// Packets per access for a station at `length` with base length `base`.
/// Throws unless length = base * 2^k.
int txop_packets(int length, int base);

bool is_power_of_two_multiple(int length, int base);

struct AdaptLimits {
  int base = 16;
  int max_length = 16 * 1024;
};

class AlzcAdapter {
 public:
  explicit AlzcAdapter(AdaptLimits limits) : limits_(limits) {}

  /// New length after a schedule with the given idle/busy counts (own slot
  /// counted busy). Halving needs two consecutive schedules with equal busy
  /// counts at the current length.
  int on_schedule_end(int length, int idle_count, int busy_count);

  std::optional<int> previous_busy() const { return previous_busy_; }

 private:
  AdaptLimits limits_;
  std::optional<int> previous_busy_;
};

struct FEntry {
  int f = 1;
  double ci_low = 1.0;
  double ci_high = 1.0;
};

/// f(C): schedules by which C-1 L-MAC stations from a uniform start have
/// converged with the configured confidence.
class FTable {
 public:
  void set(int length, FEntry entry) { entries_[length] = entry; }
  bool covers(int length) const { return entries_.count(length) != 0; }
  int f(int length) const;
  const FEntry& entry(int length) const;
  int max_length() const;
  const std::map<int, FEntry>& entries() const { return entries_; }

  /// CSV with header `C,f,ci_low,ci_high`.
  void write_csv(std::ostream& os) const;
  static FTable read_csv(std::istream& is);

 private:
  std::map<int, FEntry> entries_;
};

struct FTableOptions {
  double confidence = 0.95;
  int replications = 1000;
  double beta = 0.95;
  std::int64_t cap_schedules = 1'000'000;
  int bootstrap_resamples = 200;
  std::uint64_t seed = 1;
};

/// Monte Carlo build over the given schedule lengths. Replications that hit
/// the cap count as not converged.
FTable f_table_build(std::span<const int> lengths, const FTableOptions& options);

/// Smallest n with at least `confidence` of the samples converged within n
/// schedules (a sample value k means k collided schedules before the first
/// clean one, so it is converged within k+1). Non-converged samples are
/// passed as negative values.
int f_from_samples(std::span<const std::int64_t> samples, double confidence);

enum class AlmacAction { Keep, Double, BeginProbe, CommitProbe, RevertProbe };

struct AlmacDecision {
  AlmacAction action = AlmacAction::Keep;
  int new_length = 0;
};

class AlmacAdapter {
 public:
  AlmacAdapter(AdaptLimits limits, const FTable* table, int probe_every = 10);

  AlmacDecision on_schedule_end(int length, Feedback own);

  bool probing() const { return probing_; }
  int schedules_since_check() const { return since_check_; }
  int checkpoints() const { return checkpoints_; }

 private:
  AdaptLimits limits_;
  const FTable* table_;
  int probe_every_;
  int since_check_ = 0;
  int checkpoints_ = 0;
  bool probing_ = false;
  int pre_probe_length_ = 0;
};

}  // namespace cfmac

#include "cfmac/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cfmac/kernels.hpp"

namespace cfmac {

std::string_view to_string(AdaptationKind kind) {
  switch (kind) {
    case AdaptationKind::None: return "none";
    case AdaptationKind::ApAnnounced: return "ap";
    case AdaptationKind::Mimd: return "alzc";
    case AdaptationKind::Almac: return "almac";
  }
  return "?";
}

std::optional<AdaptationKind> parse_adaptation(std::string_view name) {
  for (auto kind : {AdaptationKind::None, AdaptationKind::ApAnnounced, AdaptationKind::Mimd, AdaptationKind::Almac})
    if (name == to_string(kind)) return kind;
  if (name == "azc") return AdaptationKind::Mimd;
  return std::nullopt;
}

int ap_adapt(int length, int idle_count) {
  if (idle_count == 0) return length + 1;
  if (idle_count >= 2) return std::max(1, length - 1);
  return length;
}

bool is_power_of_two_multiple(int length, int base) {
  if (base < 1 || length < base || length % base != 0) return false;
  const int ratio = length / base;
  return (ratio & (ratio - 1)) == 0;
}

int txop_packets(int length, int base) {
  if (!is_power_of_two_multiple(length, base))
    throw std::invalid_argument("schedule length " + std::to_string(length) + " is not " + std::to_string(base) +
                                " times a power of two");
  return length / base;
}

int AlzcAdapter::on_schedule_end(int length, int idle_count, int busy_count) {
  int next = length;
  if (idle_count == 0) {
    next = std::min(2 * length, limits_.max_length);
  } else if (2 * idle_count >= length && previous_busy_ && *previous_busy_ == busy_count) {
    next = std::max(length / 2, limits_.base);
  }
  if (next != length)
    previous_busy_.reset();
  else
    previous_busy_ = busy_count;
  return next;
}

// ---- f-table ----------------------------------------------------------------

const FEntry& FTable::entry(int length) const {
  auto it = entries_.find(length);
  if (it == entries_.end()) throw std::out_of_range("f-table has no entry for C=" + std::to_string(length));
  return it->second;
}

int FTable::f(int length) const { return entry(length).f; }

int FTable::max_length() const { return entries_.empty() ? 0 : entries_.rbegin()->first; }

void FTable::write_csv(std::ostream& os) const {
  os << "C,f,ci_low,ci_high\n";
  for (const auto& [length, e] : entries_) os << length << ',' << e.f << ',' << e.ci_low << ',' << e.ci_high << '\n';
}

FTable FTable::read_csv(std::istream& is) {
  FTable table;
  std::string line;
  if (!std::getline(is, line) || line.rfind("C,f", 0) != 0) throw std::runtime_error("f-table CSV: missing header");
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string c, f, lo, hi;
    if (!std::getline(fields, c, ',') || !std::getline(fields, f, ',') || !std::getline(fields, lo, ',') ||
        !std::getline(fields, hi, ','))
      throw std::runtime_error("f-table CSV: malformed row " + std::to_string(row));
    FEntry e{std::stoi(f), std::stod(lo), std::stod(hi)};
    if (e.f < 1) throw std::runtime_error("f-table CSV: f must be >= 1 on row " + std::to_string(row));
    table.set(std::stoi(c), e);
  }
  return table;
}

int f_from_samples(std::span<const std::int64_t> samples, double confidence) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  std::vector<std::int64_t> needed;
  for (auto k : samples)
    if (k >= 0) needed.push_back(k + 1);
  const auto required = static_cast<std::size_t>(std::ceil(confidence * static_cast<double>(samples.size()) - 1e-9));
  if (required == 0) return 1;
  if (needed.size() < required) throw std::runtime_error("too few replications converged to reach the confidence");
  std::nth_element(needed.begin(), needed.begin() + (required - 1), needed.end());
  return static_cast<int>(std::max<std::int64_t>(1, needed[required - 1]));
}

FTable f_table_build(std::span<const int> lengths, const FTableOptions& options) {
  if (options.replications < 1000) throw std::invalid_argument("f-table needs at least 1000 replications");
  FTable table;
  ProtocolParams params;
  params.beta = options.beta;
  const PhyParams phy;
  for (int length : lengths) {
    if (length < 2) throw std::invalid_argument("f-table lengths must be >= 2");
    const auto seed = mix_seed(options.seed, static_cast<std::uint64_t>(length));
    auto samples = replicate(options.replications, seed, [&](std::uint64_t s, int) {
      return schedule_convergence(ProtocolKind::Lmac, length - 1, length, params, s, options.cap_schedules, phy)
          .schedules;
    });
    FEntry e;
    e.f = f_from_samples(samples, options.confidence);

    std::vector<int> boot(options.bootstrap_resamples);
    Rng rng = make_stream(seed, 0, StreamKind::Replication);
    std::vector<std::int64_t> resample(samples.size());
    for (auto& b : boot) {
      for (auto& x : resample) x = samples[uniform_int(rng, 0, static_cast<int>(samples.size()) - 1)];
      b = f_from_samples(resample, options.confidence);
    }
    std::sort(boot.begin(), boot.end());
    if (!boot.empty()) {
      e.ci_low = boot[static_cast<std::size_t>(0.025 * (boot.size() - 1))];
      e.ci_high = boot[static_cast<std::size_t>(std::ceil(0.975 * (boot.size() - 1)))];
    } else {
      e.ci_low = e.ci_high = e.f;
    }
    table.set(length, e);
  }
  return table;
}

// ---- A-L-MAC ------------------------------------------------------------------

AlmacAdapter::AlmacAdapter(AdaptLimits limits, const FTable* table, int probe_every)
    : limits_(limits), table_(table), probe_every_(probe_every) {
  if (!table_) throw std::invalid_argument("A-L-MAC needs an f-table");
  if (probe_every_ < 1) throw std::invalid_argument("probe cadence must be >= 1");
}

AlmacDecision AlmacAdapter::on_schedule_end(int length, Feedback own) {
  if (probing_) {
    probing_ = false;
    since_check_ = 0;
    if (own == Feedback::Failure) return {AlmacAction::RevertProbe, pre_probe_length_};
    checkpoints_ = 0;
    return {AlmacAction::CommitProbe, length};
  }
  if (++since_check_ < table_->f(length)) return {AlmacAction::Keep, length};

  since_check_ = 0;
  ++checkpoints_;
  if (own == Feedback::Failure) {
    const int doubled = 2 * length;
    if (doubled > limits_.max_length || !table_->covers(doubled)) return {AlmacAction::Keep, length};
    checkpoints_ = 0;
    return {AlmacAction::Double, doubled};
  }
  if (checkpoints_ % probe_every_ == 0 && length / 2 >= limits_.base && table_->covers(length / 2)) {
    probing_ = true;
    pre_probe_length_ = length;
    return {AlmacAction::BeginProbe, length / 2};
  }
  return {AlmacAction::Keep, length};
}

}  // namespace cfmac

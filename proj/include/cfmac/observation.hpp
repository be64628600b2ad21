#pragma once

#include <cstdint>
#include <vector>

namespace cfmac {

/// Busy/idle record of one schedule, indexed by position relative to the
/// station's phase origin (1..length).
class ObservationWindow {
 public:
  explicit ObservationWindow(int length = 1);

  int length() const { return static_cast<int>(busy_.size()); }

  void record(int position, bool busy);

  /// Idle positions of the recorded schedule, ascending. Clears `out` first.
  void idle_positions(std::vector<int>& out) const;
  std::vector<int> idle_positions() const;
  int busy_count() const { return busy_count_; }
  int idle_count() const { return length() - busy_count_; }

  /// Discard all observations and start a window of `new_length` slots.
  void rebuild(int new_length);
  void clear();

 private:
  std::vector<std::uint8_t> busy_;
  int busy_count_ = 0;
};

}  // namespace cfmac

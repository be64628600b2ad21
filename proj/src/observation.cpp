#include "cfmac/observation.hpp"

#include <algorithm>
#include <stdexcept>

namespace cfmac {

ObservationWindow::ObservationWindow(int length) { rebuild(length); }

void ObservationWindow::record(int position, bool busy) {
  if (position < 1 || position > length()) throw std::out_of_range("observation outside window");
  auto& cell = busy_[position - 1];
  busy_count_ += static_cast<int>(busy) - static_cast<int>(cell);
  cell = busy;
}

void ObservationWindow::idle_positions(std::vector<int>& out) const {
  out.clear();
  for (int j = 0; j < length(); ++j)
    if (!busy_[j]) out.push_back(j + 1);
}

std::vector<int> ObservationWindow::idle_positions() const {
  std::vector<int> out;
  idle_positions(out);
  return out;
}

void ObservationWindow::rebuild(int new_length) {
  if (new_length < 1) throw std::invalid_argument("window length must be >= 1");
  busy_.assign(new_length, 0);
  busy_count_ = 0;
}

void ObservationWindow::clear() {
  std::fill(busy_.begin(), busy_.end(), 0);
  busy_count_ = 0;
}

}  // namespace cfmac

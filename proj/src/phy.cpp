#include "cfmac/phy.hpp"

#include <stdexcept>

namespace cfmac {

namespace {
constexpr double kAckBodyBytes = 14.0;

double bytes_to_us(double bytes, double rate_bps) { return bytes * 8.0 / rate_bps * 1e6; }
}  // namespace

double PhyParams::payload_time_us() const { return bytes_to_us(payload_bytes, data_rate_bps); }

double PhyParams::header_time_us() const {
  return bytes_to_us(mac_header_bytes, data_rate_bps) + bytes_to_us(phy_header_bytes, basic_rate_bps);
}

double PhyParams::ack_time_us() const {
  return bytes_to_us(mac_header_bytes, data_rate_bps) + bytes_to_us(kAckBodyBytes, data_rate_bps);
}

double PhyParams::success_duration_us(unsigned packets) const {
  if (packets == 0) throw std::invalid_argument("success slot needs at least one packet");
  const double exchange = header_time_us() + payload_time_us() + sifs_us + ack_time_us();
  return difs_us + sigma_us + packets * exchange;
}

double PhyParams::collision_duration_us() const {
  return difs_us + sigma_us + header_time_us() + payload_time_us() + difs_us;
}

void PhyParams::validate() const {
  if (!(data_rate_bps > 0) || !(basic_rate_bps > 0))
    throw std::invalid_argument("PHY rates must be positive");
  if (phy_header_bytes < 0 || mac_header_bytes < 0 || payload_bytes <= 0)
    throw std::invalid_argument("frame sizes must be non-negative and payload positive");
  if (!(sigma_us > 0) || sifs_us < 0 || difs_us < 0)
    throw std::invalid_argument("interframe spaces must be non-negative and sigma positive");
}

std::string_view to_string(SlotKind kind) {
  switch (kind) {
    case SlotKind::Idle: return "idle";
    case SlotKind::Success: return "success";
    case SlotKind::Collision: return "collision";
    case SlotKind::Error: return "error";
  }
  return "?";
}

double slot_duration(SlotKind kind, const PhyParams& phy, unsigned packets) {
  switch (kind) {
    case SlotKind::Idle: return phy.sigma_us;
    case SlotKind::Success: return phy.success_duration_us(packets);
    case SlotKind::Collision:
    case SlotKind::Error: return phy.collision_duration_us();
  }
  throw std::logic_error("unknown slot kind");
}

}  // namespace cfmac

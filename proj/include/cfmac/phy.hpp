#pragma once

#include <cstdint>
#include <string_view>

namespace cfmac {

// MAC/PHY timing constants (802.11b-like). All durations are in microseconds.
struct PhyParams {
  double data_rate_bps = 11e6;
  double basic_rate_bps = 11e6;
  int phy_header_bytes = 24;
  int mac_header_bytes = 32;
  int payload_bytes = 1020;
  double sifs_us = 10.0;
  double difs_us = 50.0;
  double sigma_us = 20.0;

  /// Time spent sending the payload, E_p.
  double payload_time_us() const;
  /// MAC header at the data rate plus PHY header at the basic rate.
  double header_time_us() const;
  /// MAC header plus a 14-byte ACK body, both at the data rate.
  double ack_time_us() const;

  /// Duration of a successful MAC slot carrying `packets` packet/ACK
  /// exchanges separated by SIFS. packets == 1 gives T_S.
  double success_duration_us(unsigned packets = 1) const;
  /// T_C; also used for channel-errored frames.
  double collision_duration_us() const;

  void validate() const;
};

enum class SlotKind : std::uint8_t { Idle, Success, Collision, Error };

std::string_view to_string(SlotKind kind);

/// Duration of a slot of the given kind. `packets` is the TXOP packet count
/// and must be >= 1 for Success slots.
double slot_duration(SlotKind kind, const PhyParams& phy, unsigned packets = 1);

}  // namespace cfmac

#include "doctest.h"

#include "cfmac/config.hpp"
#include "cfmac/phy.hpp"
#include "cfmac/rng.hpp"

using namespace cfmac;

namespace {

// Independent arithmetic for the 11 Mbit/s timing: bits / 11 = microseconds.
double us(double bytes) { return bytes * 8.0 / 11.0; }

}  // namespace

TEST_CASE("slot durations at 11 Mbit/s with 1020 byte payloads") {
  const PhyParams phy;
  const double header = us(24 + 32), payload = us(1020), ack = us(32 + 14);
  CHECK(phy.header_time_us() == doctest::Approx(header).epsilon(1e-12));
  CHECK(phy.payload_time_us() == doctest::Approx(payload).epsilon(1e-12));
  CHECK(phy.ack_time_us() == doctest::Approx(ack).epsilon(1e-12));

  const double ts = 50 + 20 + header + payload + 10 + ack;
  CHECK(ts == doctest::Approx(896.0).epsilon(1e-12));
  CHECK(slot_duration(SlotKind::Success, phy, 1) == doctest::Approx(896.0).epsilon(1e-12));
  CHECK(slot_duration(SlotKind::Success, phy, 2) == doctest::Approx(1722.0).epsilon(1e-12));
  CHECK(slot_duration(SlotKind::Idle, phy) == 20.0);

  const double tc = 50 + 20 + header + payload + 50;
  CHECK(slot_duration(SlotKind::Collision, phy) == doctest::Approx(tc).epsilon(1e-12));
  CHECK(slot_duration(SlotKind::Collision, phy) == doctest::Approx(902.545).epsilon(1e-6));
  CHECK(slot_duration(SlotKind::Error, phy) == slot_duration(SlotKind::Collision, phy));
}

TEST_CASE("success with zero packets is rejected") {
  CHECK_THROWS_AS(slot_duration(SlotKind::Success, PhyParams{}, 0), std::invalid_argument);
}

TEST_CASE("experiment payload is 1000 bytes") {
  const auto phy = SimConfig::experiment_phy();
  CHECK(phy.payload_bytes == 1000);
  CHECK(phy.success_duration_us(1) == doctest::Approx(896.0 - us(20)).epsilon(1e-12));
}

TEST_CASE("invalid phy parameters are rejected") {
  PhyParams phy;
  phy.data_rate_bps = 0;
  CHECK_THROWS(phy.validate());
  phy = PhyParams{};
  phy.sigma_us = -1;
  CHECK_THROWS(phy.validate());
}

TEST_CASE("streams are independent of each other and reproducible") {
  auto a = make_stream(42, 1, StreamKind::Protocol);
  auto b = make_stream(42, 1, StreamKind::Protocol);
  auto c = make_stream(42, 2, StreamKind::Protocol);
  auto d = make_stream(42, 1, StreamKind::Traffic);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
  CHECK(replication_seed(1, 0) != replication_seed(1, 1));
  CHECK(replication_seed(1, 5) == replication_seed(1, 5));
}

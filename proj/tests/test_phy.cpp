#include <catch2/catch_amalgamated.hpp>

#include "dearfsim/phy.hpp"

using namespace dearfsim;

static const PhyParams kPhy{};  // 650 kbps

TEST_CASE("airtimes at the base rate") {
  // Independent oracle: bytes * 8 / 0.65 Mbps, rounded up.
  REQUIRE(tx_duration_us(100, kPhy) == 1231);  // 800 bits / 0.65 = 1230.77
  REQUIRE(tx_duration_us(14, kPhy) == 173);    // ack: 112 / 0.65 = 172.3
  REQUIRE(tx_duration_us(102, kPhy) == 1256);  // 816 / 0.65 = 1255.4
  REQUIRE(tx_duration_us(62, kPhy) == 764);    // 496 / 0.65 = 763.08
  REQUIRE(tx_duration_us(10, kPhy) == 124);    // 80 / 0.65 = 123.1
}

TEST_CASE("airtime rounds up, never down") {
  // 65 bytes = 520 bits = exactly 800 us: no rounding.
  REQUIRE(tx_duration_us(65, kPhy) == 800);
  // one more byte adds 8 bits = 12.3 us -> 813.
  REQUIRE(tx_duration_us(66, kPhy) == 813);
}

TEST_CASE("zero-size frame is rejected") {
  REQUIRE_THROWS_AS(tx_duration_us(0, kPhy), std::invalid_argument);
}

TEST_CASE("power draw ordering is enforced") {
  PowerDraw ok{};
  REQUIRE_NOTHROW(ok.validate());
  PowerDraw bad{100, 145, 70, 5};
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("ledger arithmetic is exact") {
  PowerDraw d{};
  EnergyLedger l;
  // 1.6 s of sleep at 5 mW = 8 mJ = 8,000,000 nJ.
  l.add(PowerState::Sleep, 1'600'000, d);
  REQUIRE(l.energy_nj == 8'000'000);
  REQUIRE(l.awake_energy_nj == 0);
  // 1231 us of Tx at 285 mW = 350,835 nJ.
  l.add(PowerState::Tx, 1231, d);
  REQUIRE(l.energy_nj == 8'000'000 + 350'835);
  REQUIRE(l.awake_energy_nj == 350'835);
  REQUIRE(l.total_time_us() == 1'601'231);
  REQUIRE(l.awake_time_us() == 1231);
}

TEST_CASE("channel rejects collisions in contention-free windows") {
  Channel c;
  REQUIRE_NOTHROW(c.record_collision_event(WindowKind::Nra));
  REQUIRE_NOTHROW(c.record_collision_event(WindowKind::Ci));
  REQUIRE_NOTHROW(c.record_collision_event(WindowKind::Generic));
  REQUIRE_THROWS_AS(c.record_collision_event(WindowKind::Dra), std::logic_error);
  REQUIRE_THROWS_AS(c.record_collision_event(WindowKind::Dii), std::logic_error);
  REQUIRE(c.collision_events(WindowKind::Nra) == 1);
  REQUIRE(c.collision_events(WindowKind::Dra) == 0);
}

#include <catch2/catch_amalgamated.hpp>

#include "dearfsim/raw_layout.hpp"

using namespace dearfsim;

TEST_CASE("slot assignment formula") {
  REQUIRE(assign_slot(1, 0, 10) == 1);
  REQUIRE(assign_slot(9, 1, 10) == 0);
  REQUIRE(assign_slot(1234, 17, 10) == (1234 + 17) % 10);
  REQUIRE_THROWS_AS(assign_slot(1, 0, 0), std::invalid_argument);
}

TEST_CASE("slot assignment brute-force table") {
  // Oracle: repeated subtraction instead of the % operator.
  for (std::uint32_t n = 1; n <= 32; ++n) {
    std::uint32_t offset = n / 2;
    for (std::uint32_t aid = 1; aid < 10000; ++aid) {
      std::uint64_t v = aid + offset;
      while (v >= n) v -= n;
      REQUIRE(assign_slot(aid, offset, n) == v);
    }
  }
}

TEST_CASE("offset rotation policy") {
  Config cfg;
  REQUIRE(next_offset(0, 10, cfg) == 0);
  REQUIRE(next_offset(7, 10, cfg) == 7);
  REQUIRE(next_offset(13, 10, cfg) == 3);
  cfg.offset_policy = "fixed";
  cfg.fixed_offset = 4;
  REQUIRE(next_offset(13, 10, cfg) == 4);
}

TEST_CASE("contiguous group blocks") {
  // 1000 devices in 100 groups: AIDs 1..10 in group 0, 991..1000 in group 99.
  REQUIRE(group_of_aid(1, 1000, 100) == 0);
  REQUIRE(group_of_aid(10, 1000, 100) == 0);
  REQUIRE(group_of_aid(11, 1000, 100) == 1);
  REQUIRE(group_of_aid(1000, 1000, 100) == 99);
  // Uneven split still covers every group exactly once in order.
  std::uint32_t prev = 0;
  for (std::uint32_t aid = 1; aid <= 1234; ++aid) {
    std::uint32_t g = group_of_aid(aid, 1234, 7);
    REQUIRE(g < 7);
    REQUIRE(g >= prev);
    prev = g;
  }
  REQUIRE(prev == 6);
}

TEST_CASE("baseline interval layout") {
  Config cfg;
  std::vector<DeviceRef> pending;
  // Devices in groups 0, 2, 2.
  pending.push_back({0, 1, 0});
  pending.push_back({5, 6, 2});
  pending.push_back({7, 8, 2});
  auto result = build_basic_dtim(3, 0, pending, cfg);
  const DtimPlan& plan = result.plan;
  REQUIRE(result.carried_groups.empty());
  REQUIRE(plan.raws.size() == 2);  // only traffic-bearing groups get a window
  REQUIRE(plan.dtim_beacon_air_us == 1256);
  const RawWindow& r0 = plan.raws[0];
  REQUIRE(r0.has_tim);
  REQUIRE(r0.tim_time == 1256);
  REQUIRE(r0.start == 1256 + 764);
  REQUIRE(r0.duration_us == 200'000);
  REQUIRE(r0.slot_count == 10);
  // dtim 3, 10 slots -> offset 3; AID 1 -> slot 4.
  REQUIRE(r0.slot_devices[4] == std::vector<std::uint32_t>{0});
  const RawWindow& r1 = plan.raws[1];
  REQUIRE(r1.tim_time == r0.end());
  REQUIRE_NOTHROW(validate_plan(plan, cfg));
}

TEST_CASE("baseline layout carries groups that do not fit") {
  Config cfg;
  cfg.basic_group_count = 7;
  std::vector<DeviceRef> pending;
  for (std::uint32_t g = 0; g < 7; ++g) pending.push_back({g, g * 100 + 1, g});
  cfg.dtim_interval_us = 500'000;  // room for two windows only
  auto result = build_basic_dtim(0, 0, pending, cfg);
  REQUIRE(result.plan.raws.size() == 2);
  REQUIRE(result.carried_groups == std::vector<std::uint32_t>{2, 3, 4, 5, 6});
  REQUIRE_NOTHROW(validate_plan(result.plan, cfg));
}

TEST_CASE("seven groups with traffic fit a default interval") {
  Config cfg;
  cfg.basic_group_count = 7;
  std::vector<DeviceRef> pending;
  for (std::uint32_t g = 0; g < 7; ++g) pending.push_back({g, g * 100 + 1, g});
  auto result = build_basic_dtim(0, 0, pending, cfg);
  REQUIRE(result.plan.raws.size() == 7);
  REQUIRE(result.carried_groups.empty());
  // 1256 + 7 * (764 + 200000) = 1406604 <= 1600000.
  REQUIRE(result.plan.raws.back().end() == 1256 + 7ull * (764 + 200'000));
}

TEST_CASE("plan validation rejects malformed layouts") {
  Config cfg;
  DtimPlan plan;
  plan.start = 0;
  plan.dtim_beacon_air_us = 1256;
  RawWindow w;
  w.kind = WindowKind::Dra;
  w.start = 1000;  // overlaps the beacon
  w.duration_us = 1684;
  w.slot_duration_us = 1684;
  w.slot_count = 1;
  w.slot_devices.resize(1);
  plan.raws.push_back(w);
  REQUIRE_THROWS_AS(validate_plan(plan, cfg), std::logic_error);

  plan.raws[0].start = 2000;
  REQUIRE_NOTHROW(validate_plan(plan, cfg));

  plan.raws[0].slot_devices[0] = {1, 2};  // two devices in a dedicated slot
  REQUIRE_THROWS_AS(validate_plan(plan, cfg), std::logic_error);
}

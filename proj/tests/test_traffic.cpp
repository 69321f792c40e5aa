#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "dearfsim/traffic.hpp"

using namespace dearfsim;

TEST_CASE("expiry arithmetic") {
  // Arrival in interval 2, deadline 5 intervals: service counts through the
  // end of interval 7.
  REQUIRE(expiry_instant(2, 5, 1'600'000) == 8 * 1'600'000);
  REQUIRE(expiry_instant(0, 1, 1'600'000) == 2 * 1'600'000);
}

TEST_CASE("one-shot arrivals: one deadline packet per device in the window") {
  Config cfg;
  ScenarioSpec spec{300, 3, 7};
  auto packets = generate_arrivals(spec, cfg);

  std::map<std::uint32_t, int> per_device;
  std::uint64_t window = 3ull * cfg.dtim_interval_us;
  std::size_t dsmd_packets = 0;
  for (const auto& p : packets) {
    if (!p.has_deadline) continue;
    ++dsmd_packets;
    ++per_device[p.owner];
    REQUIRE(p.owner < 300);
    REQUIRE(p.arrival < window);
    REQUIRE(p.arrival_dtim == p.arrival / cfg.dtim_interval_us);
    REQUIRE(p.expiry_dtim == p.arrival_dtim + cfg.deadline_dtims);
    REQUIRE(p.size_bytes == 100);
  }
  REQUIRE(dsmd_packets == 300);
  for (auto& [d, n] : per_device) REQUIRE(n == 1);

  // Arrivals spread over all three intervals.
  std::map<std::uint32_t, int> per_dtim;
  for (const auto& p : packets)
    if (p.has_deadline) ++per_dtim[p.arrival_dtim];
  REQUIRE(per_dtim.size() == 3);
  for (auto& [d, n] : per_dtim) REQUIRE(n > 50);
}

TEST_CASE("delay-tolerant devices offer one packet per interval") {
  Config cfg;
  ScenarioSpec spec{10, 1, 1};
  auto packets = generate_arrivals(spec, cfg);
  std::map<std::uint32_t, std::vector<SimTime>> per_device;
  for (const auto& p : packets) {
    if (p.has_deadline) continue;
    REQUIRE(p.owner >= 10);
    REQUIRE(p.owner < 10 + cfg.n_non_dsmd);
    per_device[p.owner].push_back(p.arrival);
  }
  REQUIRE(per_device.size() == cfg.n_non_dsmd);
  // 18 s / 1.6 s = 11.25: the 12th window is truncated, so its packet only
  // exists when it lands before the horizon.
  const std::uint32_t full = cfg.sim_time_us / cfg.dtim_interval_us;
  for (auto& [d, arr] : per_device) {
    REQUIRE(arr.size() >= full);
    REQUIRE(arr.size() <= full + 1);
    for (std::uint32_t i = 0; i < arr.size(); ++i) {
      REQUIRE(arr[i] >= i * cfg.dtim_interval_us);
      REQUIRE(arr[i] < (i + 1) * cfg.dtim_interval_us);
      REQUIRE(arr[i] < cfg.sim_time_us);
    }
  }
}

TEST_CASE("cyclic arrivals repeat the window back to back") {
  Config cfg;
  cfg.arrival_model = "cyclic";
  cfg.n_non_dsmd = 0;
  ScenarioSpec spec{50, 2, 3};
  auto packets = generate_arrivals(spec, cfg);
  // 18 s horizon / 3.2 s cycle = 5.625 cycles: 6 windows start, the last is
  // truncated, so each device gets 5 or 6 packets.
  std::map<std::uint32_t, int> per_device;
  for (const auto& p : packets) {
    REQUIRE(p.has_deadline);
    ++per_device[p.owner];
  }
  for (auto& [d, n] : per_device) {
    REQUIRE(n >= 5);
    REQUIRE(n <= 6);
  }
}

TEST_CASE("ids follow arrival order and the schedule is deterministic") {
  Config cfg;
  ScenarioSpec spec{100, 5, 42};
  auto a = generate_arrivals(spec, cfg);
  auto b = generate_arrivals(spec, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].owner == b[i].owner);
    REQUIRE(a[i].arrival == b[i].arrival);
    REQUIRE(a[i].id == i);
    if (i > 0) REQUIRE(a[i].arrival >= a[i - 1].arrival);
  }
  // A different seed moves arrivals.
  auto c = generate_arrivals({100, 5, 43}, cfg);
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].arrival == c[i].arrival) ++same;
  REQUIRE(same < a.size() / 10);
}

TEST_CASE("zero delay-sensitive devices still offers background traffic") {
  Config cfg;
  ScenarioSpec spec{0, 1, 1};
  auto packets = generate_arrivals(spec, cfg);
  REQUIRE(!packets.empty());
  for (const auto& p : packets) REQUIRE_FALSE(p.has_deadline);
}

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dearfsim/config.hpp"
#include "dearfsim/event_queue.hpp"
#include "dearfsim/phy.hpp"

namespace dearfsim {

// X_slot = (AID_X + N_offset) mod N
inline std::uint32_t assign_slot(std::uint32_t aid, std::uint32_t n_offset,
                                 std::uint32_t slot_count) {
  if (slot_count == 0) throw std::invalid_argument("assign_slot: slot_count must be >= 1");
  return (aid + n_offset) % slot_count;
}

// Per-interval offset rotated by the AP for fairness.
inline std::uint32_t next_offset(std::uint32_t dtim_index, std::uint32_t slot_count,
                                 const Config& cfg) {
  if (cfg.offset_policy == "fixed") return static_cast<std::uint32_t>(cfg.fixed_offset);
  return slot_count == 0 ? 0 : dtim_index % slot_count;
}

struct RawWindow {
  WindowKind kind = WindowKind::Generic;
  SimTime start = 0;
  std::uint64_t duration_us = 0;
  std::uint64_t slot_duration_us = 0;
  std::uint32_t slot_count = 0;
  // Devices mapped to each slot. Contention-free kinds hold at most one
  // device per slot.
  std::vector<std::vector<std::uint32_t>> slot_devices;
  bool has_tim = false;
  SimTime tim_time = 0;

  SimTime end() const { return start + duration_us; }
  SimTime slot_start(std::uint32_t s) const { return start + s * slot_duration_us; }
  SimTime slot_end(std::uint32_t s) const { return slot_start(s) + slot_duration_us; }
};

struct DtimPlan {
  std::uint32_t index = 0;
  SimTime start = 0;
  std::uint64_t dtim_beacon_air_us = 0;
  std::vector<RawWindow> raws;
  bool has_special_beacon = false;
  SimTime special_beacon_time = 0;
  SimTime report_window_start = 0;  // reserved tail where the report window is placed
};

struct DeviceRef {
  std::uint32_t id;
  std::uint32_t aid;
  std::uint32_t group;
};

// Contiguous-AID-block grouping: AIDs 1..population split into group_count
// nearly equal blocks.
inline std::uint32_t group_of_aid(std::uint32_t aid, std::uint32_t population,
                                  std::uint32_t group_count) {
  if (population == 0 || group_count == 0) return 0;
  std::uint64_t g = (static_cast<std::uint64_t>(aid - 1) * group_count) / population;
  return static_cast<std::uint32_t>(g < group_count ? g : group_count - 1);
}

struct BasicDtimResult {
  DtimPlan plan;
  std::vector<std::uint32_t> carried_groups;  // groups with traffic that did not fit
};

// Baseline layout: DTIM beacon, then one TIM + RAW per group that has
// pending uplink traffic, as many as fit in the interval. Devices map to
// slots of their group's RAW via assign_slot.
inline BasicDtimResult build_basic_dtim(std::uint32_t dtim_index, SimTime start,
                                        const std::vector<DeviceRef>& pending,
                                        const Config& cfg) {
  BasicDtimResult out;
  DtimPlan& plan = out.plan;
  plan.index = dtim_index;
  plan.start = start;
  plan.dtim_beacon_air_us = cfg.dtim_beacon_air_us();

  const std::uint32_t slot_count =
      static_cast<std::uint32_t>(cfg.raw_us / cfg.raw_slot_us);
  const std::uint32_t offset = next_offset(dtim_index, slot_count, cfg);
  const std::uint64_t tim_air = cfg.tim_beacon_air_us();
  const std::uint64_t footprint = tim_air + cfg.raw_us;

  // Pending devices per group, ascending group id.
  std::vector<std::vector<const DeviceRef*>> by_group(cfg.basic_group_count);
  for (const auto& d : pending) by_group.at(d.group).push_back(&d);

  SimTime t = start + plan.dtim_beacon_air_us;
  const SimTime dtim_end = start + cfg.dtim_interval_us;
  for (std::uint32_t g = 0; g < cfg.basic_group_count; ++g) {
    if (by_group[g].empty()) continue;
    if (t + footprint > dtim_end) {
      out.carried_groups.push_back(g);
      continue;
    }
    RawWindow raw;
    raw.kind = WindowKind::Generic;
    raw.has_tim = true;
    raw.tim_time = t;
    raw.start = t + tim_air;
    raw.duration_us = cfg.raw_us;
    raw.slot_duration_us = cfg.raw_slot_us;
    raw.slot_count = slot_count;
    raw.slot_devices.resize(slot_count);
    for (const DeviceRef* d : by_group[g]) {
      raw.slot_devices[assign_slot(d->aid, offset, slot_count)].push_back(d->id);
    }
    plan.raws.push_back(std::move(raw));
    t += footprint;
  }
  return out;
}

// Structural invariants every built plan must satisfy.
inline void validate_plan(const DtimPlan& plan, const Config& cfg) {
  const SimTime dtim_end = plan.start + cfg.dtim_interval_us;
  SimTime prev_end = plan.start + plan.dtim_beacon_air_us;
  for (const auto& raw : plan.raws) {
    SimTime head = raw.has_tim ? raw.tim_time : raw.start;
    if (head < prev_end) throw std::logic_error("overlapping windows in plan");
    if (raw.end() > dtim_end) throw std::logic_error("window extends past interval end");
    if (raw.slot_count != raw.duration_us / raw.slot_duration_us)
      throw std::logic_error("slot_count inconsistent with durations");
    if (raw.slot_devices.size() != raw.slot_count)
      throw std::logic_error("slot assignment size mismatch");
    if (raw.kind == WindowKind::Dra || raw.kind == WindowKind::Dii) {
      for (const auto& s : raw.slot_devices)
        if (s.size() > 1) throw std::logic_error("contention-free slot with multiple devices");
    }
    prev_end = raw.end();
  }
}

}  // namespace dearfsim

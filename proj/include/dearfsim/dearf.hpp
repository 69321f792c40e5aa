#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "dearfsim/config.hpp"
#include "dearfsim/raw_layout.hpp"

namespace dearfsim {

enum class DsmdStatus { Idle, Contending, Transmitting };

// A delay-sensitive device that has reported its pending packet and now
// waits for a dedicated slot. report_order gives earliest-report-first
// tie-breaking within and across classes.
struct TransmittingEntry {
  std::uint32_t device;
  std::uint32_t packet;
  std::uint32_t expiry_dtim;  // last interval in which the packet may be served
  std::uint64_t report_order;
};

// The indexed family of deadline classes: class i holds the transmitting
// devices whose packet deadline ends at the i-th interval from the current
// one. Stored keyed by absolute expiry interval; re-indexing is implicit.
class DeadlineClasses {
 public:
  void insert(const TransmittingEntry& e) { classes_[e.expiry_dtim].push_back(e); }

  // Members expiring before `dtim`; removed from the family.
  std::vector<TransmittingEntry> take_expired_before(std::uint32_t dtim) {
    std::vector<TransmittingEntry> out;
    for (auto it = classes_.begin(); it != classes_.end() && it->first < dtim;) {
      for (auto& e : it->second) out.push_back(e);
      it = classes_.erase(it);
    }
    return out;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (auto& [k, v] : classes_) n += v.size();
    return n;
  }

  bool empty() const { return classes_.empty(); }

  std::map<std::uint32_t, std::vector<TransmittingEntry>>& by_expiry() { return classes_; }
  const std::map<std::uint32_t, std::vector<TransmittingEntry>>& by_expiry() const {
    return classes_;
  }

 private:
  std::map<std::uint32_t, std::vector<TransmittingEntry>> classes_;
};

struct Allocation {
  std::vector<TransmittingEntry> grants;  // dedicated-slot grants, in serving order
  std::uint64_t dra_footprint_us = 0;     // TIMs + granted slots
  std::uint64_t nra_footprint_us = 0;     // remaining budget, >= minimum
  bool congestion_branch = false;         // surplus diverted to contention access
};

// Splits the available interval time between dedicated slots for deadline
// classes and contention-based access. Class 0 is always served first, the
// contention side keeps at least `min_nra_us`, and the surplus goes to the
// contention side when the previous interval saw at least
// `collision_threshold` collision events there, otherwise to classes
// 1, 2, ... in order (earliest report first within a class). Granted
// members are removed from the family.
inline Allocation allocate_resources(DeadlineClasses& classes, std::uint32_t current_dtim,
                                     std::uint64_t t_avail_us, std::uint64_t min_nra_us,
                                     std::uint64_t collision_threshold,
                                     std::uint64_t n_collision, const Config& cfg) {
  if (t_avail_us < min_nra_us) throw std::logic_error("allocate_resources: t_avail < minimum");
  Allocation out;
  const std::uint64_t budget = t_avail_us - min_nra_us;
  const std::uint64_t tim_air = cfg.tim_beacon_air_us();
  const std::uint32_t per_raw = static_cast<std::uint32_t>(cfg.raw_us / cfg.dra_slot_us);

  auto try_grant = [&](const TransmittingEntry& e) {
    std::uint64_t add = cfg.dra_slot_us;
    if (out.grants.size() % per_raw == 0) add += tim_air;  // opens a new window
    if (out.dra_footprint_us + add > budget) return false;
    out.dra_footprint_us += add;
    out.grants.push_back(e);
    return true;
  };

  auto& by_expiry = classes.by_expiry();

  // Class 0 first, earliest report first.
  if (auto it = by_expiry.find(current_dtim); it != by_expiry.end()) {
    auto& members = it->second;
    std::size_t granted = 0;
    for (auto& e : members) {
      if (!try_grant(e)) break;
      ++granted;
    }
    members.erase(members.begin(), members.begin() + granted);
    if (members.empty()) by_expiry.erase(it);
  }

  out.congestion_branch = n_collision >= collision_threshold;
  if (!out.congestion_branch) {
    // Surplus to classes 1, 2, ... in order.
    bool full = false;
    for (auto it = by_expiry.upper_bound(current_dtim); it != by_expiry.end() && !full;) {
      auto& members = it->second;
      std::size_t granted = 0;
      for (auto& e : members) {
        if (!try_grant(e)) {
          full = true;
          break;
        }
        ++granted;
      }
      members.erase(members.begin(), members.begin() + granted);
      it = members.empty() ? by_expiry.erase(it) : std::next(it);
    }
  }

  // Whatever the dedicated side did not consume belongs to contention
  // access: the minimum, plus the surplus when congested or when the
  // classes are exhausted.
  out.nra_footprint_us = t_avail_us - out.dra_footprint_us;
  return out;
}

// Deadline-aware interval layout:
//   DTIM beacon | CI | TIM+DRA ... | special beacon | TIM+NRA ... | DII
// The report (DII) window is sized only after the indication (CI) window is
// observed, so the plan reserves its worst case at the tail and the actual
// window is attached there mid-interval.
struct DearfDtimInputs {
  std::uint32_t dtim_index;
  SimTime start;
  // Contending devices, one slot group each (group < ci_group_count).
  std::vector<DeviceRef> contending;
  // Contention-based participants (delay-tolerant devices with pending data).
  std::vector<DeviceRef> nra_pending;
  Allocation allocation;
};

inline std::uint64_t dii_reserve_us(std::uint32_t n_dsmd, const Config& cfg) {
  return static_cast<std::uint64_t>(n_dsmd) * cfg.dii_slot_us;
}

inline std::uint64_t dearf_t_avail_us(std::uint32_t n_dsmd, const Config& cfg) {
  std::uint64_t reserve = cfg.dtim_beacon_air_us() + cfg.ci_raw_us +
                          cfg.tim_beacon_air_us() /* special beacon */ +
                          dii_reserve_us(n_dsmd, cfg);
  if (reserve >= cfg.dtim_interval_us) throw std::logic_error("interval overflow");
  return cfg.dtim_interval_us - reserve;
}

inline DtimPlan build_dearf_dtim(const DearfDtimInputs& in, std::uint32_t n_dsmd,
                                 const Config& cfg) {
  DtimPlan plan;
  plan.index = in.dtim_index;
  plan.start = in.start;
  plan.dtim_beacon_air_us = cfg.dtim_beacon_air_us();
  const std::uint64_t tim_air = cfg.tim_beacon_air_us();
  const SimTime dtim_end = in.start + cfg.dtim_interval_us;
  plan.report_window_start = dtim_end - dii_reserve_us(n_dsmd, cfg);

  SimTime t = in.start + plan.dtim_beacon_air_us;

  // Indication window: one micro-slot per device group, no announcing
  // beacon. Contending devices signal in their group's slot.
  {
    RawWindow ci;
    ci.kind = WindowKind::Ci;
    ci.start = t;
    ci.duration_us = cfg.ci_raw_us;
    ci.slot_duration_us = cfg.ci_slot_us;
    ci.slot_count = cfg.ci_group_count();
    ci.slot_devices.resize(ci.slot_count);
    for (const auto& d : in.contending) ci.slot_devices.at(d.group).push_back(d.id);
    t = ci.end();
    plan.raws.push_back(std::move(ci));
  }

  // Dedicated windows, grants packed in serving order.
  const std::uint32_t per_raw = static_cast<std::uint32_t>(cfg.raw_us / cfg.dra_slot_us);
  std::size_t gi = 0;
  while (gi < in.allocation.grants.size()) {
    std::uint32_t n = static_cast<std::uint32_t>(
        std::min<std::size_t>(per_raw, in.allocation.grants.size() - gi));
    RawWindow dra;
    dra.kind = WindowKind::Dra;
    dra.has_tim = true;
    dra.tim_time = t;
    dra.start = t + tim_air;
    dra.slot_duration_us = cfg.dra_slot_us;
    dra.slot_count = n;
    dra.duration_us = static_cast<std::uint64_t>(n) * cfg.dra_slot_us;
    dra.slot_devices.resize(n);
    for (std::uint32_t s = 0; s < n; ++s)
      dra.slot_devices[s].push_back(in.allocation.grants[gi + s].device);
    gi += n;
    t = dra.end();
    plan.raws.push_back(std::move(dra));
  }

  // Special beacon announcing the report window to contending devices.
  plan.has_special_beacon = true;
  plan.special_beacon_time = t;
  t += tim_air;

  // Contention-based windows for delay-tolerant devices. At least one must
  // exist every interval.
  std::uint64_t nra_left = in.allocation.nra_footprint_us;
  std::vector<RawWindow> nras;
  std::uint32_t total_nra_slots = 0;
  while (nra_left >= tim_air + cfg.nra_slot_us &&
         t + tim_air + cfg.nra_slot_us <= plan.report_window_start) {
    std::uint64_t room = std::min<std::uint64_t>(
        {cfg.raw_us, nra_left - tim_air,
         static_cast<std::uint64_t>(plan.report_window_start - t - tim_air)});
    std::uint32_t n = static_cast<std::uint32_t>(room / cfg.nra_slot_us);
    if (n == 0) break;
    RawWindow nra;
    nra.kind = WindowKind::Nra;
    nra.has_tim = true;
    nra.tim_time = t;
    nra.start = t + tim_air;
    nra.slot_duration_us = cfg.nra_slot_us;
    nra.slot_count = n;
    nra.duration_us = static_cast<std::uint64_t>(n) * cfg.nra_slot_us;
    nra.slot_devices.resize(n);
    t = nra.end();
    nra_left -= tim_air + nra.duration_us;
    total_nra_slots += n;
    nras.push_back(std::move(nra));
  }
  if (nras.empty()) throw std::logic_error("no contention window fits the interval");

  // Map pending delay-tolerant devices onto the combined slot grid.
  const std::uint32_t offset = next_offset(in.dtim_index, total_nra_slots, cfg);
  for (const auto& d : in.nra_pending) {
    std::uint32_t s = assign_slot(d.aid, offset, total_nra_slots);
    for (auto& nra : nras) {
      if (s < nra.slot_count) {
        nra.slot_devices[s].push_back(d.id);
        break;
      }
      s -= nra.slot_count;
    }
  }
  for (auto& nra : nras) plan.raws.push_back(std::move(nra));
  return plan;
}

// Report window: one dedicated slot per member of every flagged group,
// whether or not that member has data. Placed in the reserved tail.
inline RawWindow build_dii_raw(const std::vector<std::uint32_t>& members, SimTime start,
                               const Config& cfg) {
  if (members.empty()) throw std::logic_error("report window requires flagged members");
  RawWindow dii;
  dii.kind = WindowKind::Dii;
  dii.start = start;
  dii.slot_duration_us = cfg.dii_slot_us;
  dii.slot_count = static_cast<std::uint32_t>(members.size());
  dii.duration_us = dii.slot_count * cfg.dii_slot_us;
  dii.slot_devices.resize(dii.slot_count);
  for (std::uint32_t s = 0; s < dii.slot_count; ++s) dii.slot_devices[s].push_back(members[s]);
  return dii;
}

}  // namespace dearfsim

#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "dearfsim/config.hpp"
#include "dearfsim/dearf.hpp"
#include "dearfsim/event_queue.hpp"
#include "dearfsim/metrics.hpp"
#include "dearfsim/phy.hpp"
#include "dearfsim/raw_layout.hpp"
#include "dearfsim/rng.hpp"
#include "dearfsim/traffic.hpp"

namespace dearfsim {

struct Device {
  std::uint32_t id = 0;
  std::uint32_t aid = 0;  // association identifier, 1-based
  bool dsmd = false;
  std::uint32_t group = 0;  // access group (scheme-dependent)
  PowerState power = PowerState::Sleep;
  SimTime power_since = 0;
  EnergyLedger ledger;
  std::deque<std::uint32_t> queue;  // pending packet ids, FIFO
  std::uint32_t cw = 15;
  std::int64_t bo_counter = -1;  // remaining backoff slots, -1 = not drawn
  DsmdStatus status = DsmdStatus::Idle;
  Rng rng{0};
};

// Per-interval scheduler bookkeeping, exposed for invariant checks.
struct DtimAudit {
  std::uint32_t dtim = 0;
  std::size_t promoted = 0;
  std::size_t expired_from_classes = 0;
  std::size_t class_entering_alloc = 0;
  std::size_t grants = 0;
  std::size_t class_after_alloc = 0;
  std::uint64_t n_collision = 0;
  bool congestion_branch = false;
};

// One full simulation run of either scheme. Single-threaded; everything is
// driven by the event queue.
class Simulation {
 public:
  Simulation(const Config& cfg, Scheme scheme, const ScenarioSpec& spec)
      : cfg_(cfg),
        scheme_(scheme),
        spec_(spec),
        phy_(cfg.phy()),
        draw_(cfg.draw()) {
    cfg_.validate(spec.n_dsmd);
    data_air_ = cfg_.data_air_us();
    ack_air_ = cfg_.ack_air_us();
    exchange_ = cfg_.exchange_us();
    setup_devices();
    setup_traffic();
  }

  RunSummary run() {
    // Boundaries are scheduled before arrivals so that at equal timestamps
    // the interval plan snapshots the queue state from strictly before the
    // boundary instant.
    for (std::uint32_t d = 0;
         static_cast<SimTime>(d) * cfg_.dtim_interval_us < cfg_.sim_time_us; ++d) {
      q_.schedule(static_cast<SimTime>(d) * cfg_.dtim_interval_us,
                  [this, d] { on_dtim_boundary(d); });
    }
    for (const auto& p : packets_) {
      q_.schedule(p.arrival, [this, pid = p.id] { on_arrival(pid); });
    }
    dispatched_ = q_.run_until(cfg_.sim_time_us);
    for (auto& d : devices_) touch(d);  // close every ledger at the horizon
    std::vector<EnergyLedger> dsmd_ledgers;
    for (auto& d : devices_)
      if (d.dsmd) dsmd_ledgers.push_back(d.ledger);
    return summarize(packets_, dsmd_ledgers, scheme_name(scheme_), spec_.n_dsmd,
                     spec_.x_dtims, spec_.seed, cfg_.dtim_interval_us,
                     cfg_.deadline_dtims);
  }

  const std::vector<Device>& devices() const { return devices_; }
  const std::vector<Packet>& packets() const { return packets_; }
  const Channel& channel() const { return channel_; }
  const std::vector<DtimAudit>& audits() const { return audits_; }
  std::size_t dispatch_count() const { return dispatched_; }
  const Config& config() const { return cfg_; }

 private:
  // ---- power and packet attribution ----

  // Closes the open power-state interval, attributing awake time and energy
  // to the head-of-queue packet.
  void touch(Device& d) {
    SimTime now = q_.now();
    std::uint64_t dur = now - d.power_since;
    if (dur > 0) {
      d.ledger.add(d.power, dur, draw_);
      if (d.power != PowerState::Sleep && !d.queue.empty()) {
        Packet& p = packets_[d.queue.front()];
        p.active_us += dur;
        p.active_energy_nj += dur * draw_.of(d.power);
      }
    }
    d.power_since = now;
  }

  void set_power(Device& d, PowerState s) {
    touch(d);
    d.power = s;
  }

  void set_status(Device& d, DsmdStatus s) {
    // Transmitting never reverts to Contending directly.
    if (d.status == DsmdStatus::Transmitting && s == DsmdStatus::Contending)
      throw std::logic_error("illegal status transition");
    d.status = s;
  }

  // ---- setup ----

  void setup_devices() {
    std::uint32_t total = spec_.n_dsmd + cfg_.n_non_dsmd;
    devices_.resize(total);
    for (std::uint32_t i = 0; i < total; ++i) {
      Device& d = devices_[i];
      d.id = i;
      d.aid = i + 1;
      d.dsmd = i < spec_.n_dsmd;
      d.cw = cfg_.cw_min;
      d.rng = Rng::stream(spec_.seed, 0x300000000ull + i);
      if (scheme_ == Scheme::Basic) {
        d.group = group_of_aid(d.aid, total, cfg_.basic_group_count);
      } else if (d.dsmd) {
        d.group = group_of_aid(d.aid, spec_.n_dsmd, cfg_.ci_group_count());
      }
    }
  }

  void setup_traffic() { packets_ = generate_arrivals(spec_, cfg_); }

  void on_arrival(std::uint32_t pid) {
    Packet& p = packets_[pid];
    Device& d = devices_[p.owner];
    touch(d);
    d.queue.push_back(pid);
    if (scheme_ == Scheme::Dearf && d.dsmd && d.status == DsmdStatus::Idle) {
      set_status(d, DsmdStatus::Contending);
    }
  }

  // ---- interval boundary ----

  void on_dtim_boundary(std::uint32_t dtim) {
    arenas_.clear();
    DtimAudit audit;
    audit.dtim = dtim;

    // Unserved class members whose deadline passed.
    auto expired_cls = classes_.take_expired_before(dtim);
    audit.expired_from_classes = expired_cls.size();

    expire_queues(dtim);

    if (scheme_ == Scheme::Dearf) {
      promote_reports(audit);
      run_dearf_dtim(dtim, audit);
    } else {
      run_basic_dtim(dtim);
    }
    audits_.push_back(audit);
  }

  void expire_queues(std::uint32_t dtim) {
    for (auto& d : devices_) {
      if (d.queue.empty()) continue;
      bool head_expired = false;
      std::deque<std::uint32_t> kept;
      bool first = true;
      for (auto pid : d.queue) {
        Packet& p = packets_[pid];
        if (p.has_deadline && p.expiry_dtim < dtim) {
          touch(d);
          record_expiry(p);
          if (first) head_expired = true;
        } else {
          kept.push_back(pid);
        }
        first = false;
      }
      if (kept.size() != d.queue.size()) {
        d.queue = std::move(kept);
        if (d.dsmd && scheme_ == Scheme::Dearf) {
          set_status(d, DsmdStatus::Idle);
          if (!d.queue.empty()) set_status(d, DsmdStatus::Contending);
        }
        (void)head_expired;
      }
    }
  }

  void promote_reports(DtimAudit& audit) {
    for (const auto& r : reports_) {
      Packet& p = packets_[r.packet];
      if (p.fate != PacketFate::Pending) continue;  // expired at this boundary
      Device& d = devices_[r.device];
      if (d.status != DsmdStatus::Contending || d.queue.empty() ||
          d.queue.front() != r.packet) {
        continue;
      }
      set_status(d, DsmdStatus::Transmitting);
      classes_.insert(TransmittingEntry{r.device, r.packet, r.expiry_dtim, r.order});
      ++audit.promoted;
    }
    reports_.clear();
  }

  // ---- baseline scheme ----

  void run_basic_dtim(std::uint32_t dtim) {
    SimTime t0 = q_.now();
    std::vector<DeviceRef> pending;
    for (const auto& d : devices_)
      if (!d.queue.empty()) pending.push_back({d.id, d.aid, d.group});

    auto result = build_basic_dtim(dtim, t0, pending, cfg_);
    validate_plan(result.plan, cfg_);
    carried_group_events_ += result.carried_groups.size();

    schedule_dtim_beacon(result.plan);
    for (const auto& raw : result.plan.raws) schedule_contended_raw(raw);
  }

  // ---- deadline-aware scheme ----

  void run_dearf_dtim(std::uint32_t dtim, DtimAudit& audit) {
    SimTime t0 = q_.now();

    audit.class_entering_alloc = classes_.size();
    std::uint64_t nra_coll = channel_.collision_events(WindowKind::Nra);
    audit.n_collision = nra_coll - nra_collision_snapshot_;
    nra_collision_snapshot_ = nra_coll;

    Allocation alloc = allocate_resources(
        classes_, dtim, dearf_t_avail_us(spec_.n_dsmd, cfg_), cfg_.nra_min_us,
        cfg_.collision_threshold, audit.n_collision, cfg_);
    audit.grants = alloc.grants.size();
    audit.class_after_alloc = classes_.size();
    audit.congestion_branch = alloc.congestion_branch;
    if (audit.class_entering_alloc != audit.grants + audit.class_after_alloc)
      throw std::logic_error("class membership not conserved by allocation");

    DearfDtimInputs in;
    in.dtim_index = dtim;
    in.start = t0;
    in.allocation = alloc;
    for (const auto& d : devices_) {
      if (d.dsmd && d.status == DsmdStatus::Contending && !d.queue.empty())
        in.contending.push_back({d.id, d.aid, d.group});
      if (!d.dsmd && !d.queue.empty()) in.nra_pending.push_back({d.id, d.aid, 0});
    }

    DtimPlan plan = build_dearf_dtim(in, spec_.n_dsmd, cfg_);
    validate_plan(plan, cfg_);

    schedule_dtim_beacon(plan);
    for (const auto& raw : plan.raws) {
      switch (raw.kind) {
        case WindowKind::Ci: schedule_ci_raw(raw, plan); break;
        case WindowKind::Dra: schedule_dra_raw(raw, alloc); break;
        case WindowKind::Nra: schedule_contended_raw(raw); break;
        default: throw std::logic_error("unexpected window kind in plan");
      }
    }

    // Special beacon: contending devices wake to learn the report window.
    if (plan.has_special_beacon) {
      std::vector<std::uint32_t> listeners;
      for (const auto& c : in.contending) listeners.push_back(c.id);
      schedule_beacon(plan.special_beacon_time, cfg_.tim_beacon_air_us(), listeners);
    }
  }

  void schedule_ci_raw(const RawWindow& ci, const DtimPlan& plan) {
    for (std::uint32_t s = 0; s < ci.slot_count; ++s) {
      const auto& devs = ci.slot_devices[s];
      if (devs.empty()) continue;
      SimTime at = ci.slot_start(s);
      std::uint64_t beacon_air = tx_duration_us(cfg_.ci_beacon_bytes, phy_);
      q_.schedule(at, [this, devs] {
        for (auto id : devs) set_power(devices_[id], PowerState::Tx);
      });
      q_.schedule(at + beacon_air, [this, devs, at, beacon_air] {
        for (auto id : devs) {
          set_power(devices_[id], PowerState::Sleep);
          channel_.record({id, at, at + beacon_air, WindowKind::Ci,
                           devs.size() > 1 ? TxOutcome::Collision : TxOutcome::Success});
        }
        if (devs.size() > 1) channel_.record_collision_event(WindowKind::Ci);
      });
    }
    // Once the indication window is observed the report window is sized and
    // attached in the reserved tail.
    q_.schedule(ci.end(), [this, ci, start = plan.report_window_start] {
      std::vector<std::uint32_t> members;
      for (std::uint32_t s = 0; s < ci.slot_count; ++s) {
        if (ci.slot_devices[s].empty()) continue;
        // Every member of a flagged group gets a slot, data or not.
        for (const auto& d : devices_) {
          if (d.dsmd && d.group == s) members.push_back(d.id);
        }
      }
      if (members.empty()) return;
      RawWindow dii = build_dii_raw(members, start, cfg_);
      schedule_dii_raw(dii, ci);
    });
  }

  void schedule_dii_raw(const RawWindow& dii, const RawWindow& ci) {
    // Occupants: flagged-group members that actually signalled.
    std::vector<bool> signalled(devices_.size(), false);
    for (const auto& slot : ci.slot_devices)
      for (auto id : slot) signalled[id] = true;

    std::uint64_t report_air = tx_duration_us(cfg_.dii_packet_bytes, phy_);
    for (std::uint32_t s = 0; s < dii.slot_count; ++s) {
      std::uint32_t id = dii.slot_devices[s][0];
      if (!signalled[id]) continue;  // empty slot
      SimTime at = dii.slot_start(s);
      q_.schedule(at, [this, id] { set_power(devices_[id], PowerState::Tx); });
      q_.schedule(at + report_air, [this, id, at, report_air] {
        Device& d = devices_[id];
        set_power(d, PowerState::Sleep);
        channel_.record({id, at, at + report_air, WindowKind::Dii, TxOutcome::Success});
        if (d.status == DsmdStatus::Contending && !d.queue.empty()) {
          const Packet& p = packets_[d.queue.front()];
          reports_.push_back({id, p.id, p.expiry_dtim, report_counter_++});
        }
      });
    }
  }

  void schedule_dra_raw(const RawWindow& dra, const Allocation& alloc) {
    std::vector<std::uint32_t> listeners;
    for (const auto& slot : dra.slot_devices) listeners.push_back(slot.at(0));
    schedule_beacon(dra.tim_time, cfg_.tim_beacon_air_us(), listeners);

    for (std::uint32_t s = 0; s < dra.slot_count; ++s) {
      std::uint32_t id = dra.slot_devices[s][0];
      SimTime at = dra.slot_start(s);
      q_.schedule(at, [this, id] {
        Device& d = devices_[id];
        if (d.status != DsmdStatus::Transmitting || d.queue.empty())
          throw std::logic_error("granted device has nothing to send");
        set_power(d, PowerState::Tx);
      });
      q_.schedule(at + data_air_, [this, id] { set_power(devices_[id], PowerState::Idle); });
      q_.schedule(at + data_air_ + cfg_.sifs_us,
                  [this, id] { set_power(devices_[id], PowerState::Rx); });
      q_.schedule(at + exchange_, [this, id, at] {
        Device& d = devices_[id];
        channel_.record({id, at, at + data_air_, WindowKind::Dra, TxOutcome::Success});
        serve_head_packet(d);
        set_power(d, PowerState::Sleep);
      });
    }
  }

  void serve_head_packet(Device& d) {
    touch(d);
    Packet& p = packets_[d.queue.front()];
    record_delivery(p, q_.now(), cfg_.dtim_interval_us);
    d.queue.pop_front();
    if (scheme_ == Scheme::Dearf && d.dsmd) {
      set_status(d, DsmdStatus::Idle);
      if (!d.queue.empty()) set_status(d, DsmdStatus::Contending);
    }
  }

  // ---- shared machinery ----

  void schedule_dtim_beacon(const DtimPlan& plan) {
    // Every device wakes for the DTIM beacon.
    q_.schedule(plan.start, [this] {
      for (auto& d : devices_) set_power(d, PowerState::Rx);
    });
    q_.schedule(plan.start + plan.dtim_beacon_air_us, [this] {
      for (auto& d : devices_) set_power(d, PowerState::Sleep);
    });
  }

  void schedule_beacon(SimTime at, std::uint64_t air, std::vector<std::uint32_t> listeners) {
    q_.schedule(at, [this, listeners] {
      for (auto id : listeners) set_power(devices_[id], PowerState::Rx);
    });
    q_.schedule(at + air, [this, listeners = std::move(listeners)] {
      for (auto id : listeners) set_power(devices_[id], PowerState::Sleep);
    });
  }

  void schedule_contended_raw(const RawWindow& raw) {
    std::vector<std::uint32_t> listeners;
    for (const auto& slot : raw.slot_devices)
      for (auto id : slot) listeners.push_back(id);
    if (listeners.empty()) return;
    if (raw.has_tim) schedule_beacon(raw.tim_time, cfg_.tim_beacon_air_us(), listeners);

    for (std::uint32_t s = 0; s < raw.slot_count; ++s) {
      if (raw.slot_devices[s].empty()) continue;
      auto arena = std::make_unique<ContentionArena>(*this, raw.kind, raw.slot_start(s),
                                                     raw.slot_end(s), raw.slot_devices[s]);
      ContentionArena* a = arena.get();
      arenas_.push_back(std::move(arena));
      q_.schedule(raw.slot_start(s), [a] { a->begin(); });
    }
  }

  // CSMA/CA inside one contention slot. Backoff expiries are scheduled as
  // cancellable events; equal-expiry devices transmit together and collide.
  class ContentionArena {
   public:
    ContentionArena(Simulation& sim, WindowKind kind, SimTime start, SimTime end,
                    std::vector<std::uint32_t> devices)
        : sim_(sim), kind_(kind), start_(start), end_(end), active_(std::move(devices)) {}

    void begin() {
      anchor_ = start_;
      for (auto id : active_) sim_.set_power(sim_.devices_[id], PowerState::Idle);
      reschedule_all();
    }

   private:
    void reschedule_all() {
      auto snapshot = active_;
      for (auto id : snapshot) schedule_or_defer(id);
    }

    // Backoff counts down whenever the channel is idle, but the holding
    // rule forbids starting a transmission whose exchange would cross the
    // slot boundary: a device that cannot transmit in this slot banks the
    // ticks it consumed and holds the rest for the next interval.
    void schedule_or_defer(std::uint32_t id) {
      Device& d = sim_.devices_[id];
      if (d.bo_counter < 0) d.bo_counter = static_cast<std::int64_t>(d.rng.uniform_inclusive(d.cw));
      const std::uint64_t bo = sim_.cfg_.backoff_slot_us;
      const SimTime idle_from = anchor_ + sim_.cfg_.difs_us;
      SimTime fire = idle_from + static_cast<std::uint64_t>(d.bo_counter) * bo;
      if (fire + sim_.exchange_ < end_) {
        pending_[id] = sim_.q_.schedule(fire, [this, id] { on_expiry(id); });
        return;
      }
      std::uint64_t span = end_ > idle_from ? (end_ - idle_from) / bo : 0;
      std::uint64_t ticks = std::min<std::uint64_t>(static_cast<std::uint64_t>(d.bo_counter), span);
      if (ticks == 0) {
        leave(id);  // no countable idle time left in this slot
        return;
      }
      pending_[id] = sim_.q_.schedule(idle_from + ticks * bo, [this, id, ticks] {
        // countdown complete for this slot; hold the remainder
        pending_.erase(id);
        sim_.devices_[id].bo_counter -= static_cast<std::int64_t>(ticks);
        leave(id);
      });
    }

    void leave(std::uint32_t id) {
      Device& d = sim_.devices_[id];
      sim_.set_power(d, PowerState::Sleep);
      active_.erase(std::find(active_.begin(), active_.end(), id));
    }

    void on_expiry(std::uint32_t id) {
      pending_.erase(id);
      SimTime now = sim_.q_.now();
      if (!round_open_) {
        round_open_ = true;
        round_t_ = now;
        round_txers_.clear();
        round_txers_.push_back(id);
        sim_.q_.schedule(now, [this] { commit_round(); });
      } else {
        if (now != round_t_) throw std::logic_error("stale backoff expiry");
        round_txers_.push_back(id);
      }
    }

    void commit_round() {
      round_open_ = false;
      // Freeze everyone else: cancel their expiries and bank the slots that
      // already counted down.
      std::uint64_t elapsed = (round_t_ - anchor_ - sim_.cfg_.difs_us) / sim_.cfg_.backoff_slot_us;
      for (auto& [id, h] : pending_) {
        sim_.q_.cancel(h);
        Device& d = sim_.devices_[id];
        d.bo_counter -= static_cast<std::int64_t>(elapsed);
        if (d.bo_counter < 0) throw std::logic_error("backoff freeze underflow");
        sim_.set_power(d, PowerState::Rx);  // carrier heard
      }
      pending_.clear();
      for (auto id : round_txers_) {
        Device& d = sim_.devices_[id];
        d.bo_counter = -1;
        sim_.set_power(d, PowerState::Tx);
      }
      sim_.q_.schedule(round_t_ + sim_.data_air_, [this] { on_data_end(); });
    }

    void on_data_end() {
      SimTime now = sim_.q_.now();
      bool success = round_txers_.size() == 1;
      for (auto id : round_txers_) {
        channel_record(id, round_t_, now, success);
        sim_.set_power(sim_.devices_[id], PowerState::Idle);
      }
      if (!success) sim_.channel_.record_collision_event(kind_);
      for (auto id : active_) {
        if (std::find(round_txers_.begin(), round_txers_.end(), id) == round_txers_.end())
          sim_.set_power(sim_.devices_[id], PowerState::Idle);
      }
      if (success) {
        // Ack follows after SIFS; bystanders overhear it.
        sim_.q_.schedule(now + sim_.cfg_.sifs_us, [this] {
          for (auto id : active_) sim_.set_power(sim_.devices_[id], PowerState::Rx);
        });
      }
      sim_.q_.schedule(now + sim_.cfg_.sifs_us + sim_.ack_air_,
                       [this, success] { on_busy_end(success); });
    }

    void on_busy_end(bool success) {
      if (success) {
        std::uint32_t id = round_txers_[0];
        Device& d = sim_.devices_[id];
        sim_.serve_head_packet(d);
        d.cw = sim_.cfg_.cw_min;
        d.bo_counter = -1;
        if (d.queue.empty()) leave(id);
      } else {
        for (auto id : round_txers_) {
          Device& d = sim_.devices_[id];
          Packet& p = sim_.packets_[d.queue.front()];
          ++p.retries;
          if (p.retries > sim_.cfg_.retry_limit) {
            sim_.touch(d);
            record_drop(p);
            d.queue.pop_front();
            if (sim_.scheme_ == Scheme::Dearf && d.dsmd) {
              sim_.set_status(d, DsmdStatus::Idle);
              if (!d.queue.empty()) sim_.set_status(d, DsmdStatus::Contending);
            }
            d.cw = sim_.cfg_.cw_min;
            d.bo_counter = -1;
            if (d.queue.empty()) {
              leave(id);
              continue;
            }
          } else {
            d.cw = std::min((d.cw + 1) * 2 - 1, sim_.cfg_.cw_max);
            d.bo_counter = -1;
          }
        }
      }
      round_txers_.clear();
      anchor_ = sim_.q_.now();
      for (auto id : active_) sim_.set_power(sim_.devices_[id], PowerState::Idle);
      reschedule_all();
    }

    void channel_record(std::uint32_t id, SimTime start, SimTime end, bool success) {
      sim_.channel_.record({id, start, end, kind_,
                            success ? TxOutcome::Success : TxOutcome::Collision});
    }

    Simulation& sim_;
    WindowKind kind_;
    SimTime start_, end_;
    SimTime anchor_ = 0;
    std::vector<std::uint32_t> active_;
    std::map<std::uint32_t, EventHandle> pending_;
    bool round_open_ = false;
    SimTime round_t_ = 0;
    std::vector<std::uint32_t> round_txers_;
  };

  friend class ContentionArena;

  struct Report {
    std::uint32_t device;
    std::uint32_t packet;
    std::uint32_t expiry_dtim;
    std::uint64_t order;
  };

  Config cfg_;
  Scheme scheme_;
  ScenarioSpec spec_;
  PhyParams phy_;
  PowerDraw draw_;
  std::uint64_t data_air_ = 0;
  std::uint64_t ack_air_ = 0;
  std::uint64_t exchange_ = 0;

  EventQueue q_;
  Channel channel_;
  std::vector<Device> devices_;
  std::vector<Packet> packets_;
  std::vector<std::unique_ptr<ContentionArena>> arenas_;

  std::vector<Report> reports_;
  std::uint64_t report_counter_ = 0;
  DeadlineClasses classes_;
  std::uint64_t nra_collision_snapshot_ = 0;

  std::vector<DtimAudit> audits_;
  std::uint64_t carried_group_events_ = 0;
  std::size_t dispatched_ = 0;
};

}  // namespace dearfsim

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dearfsim/event_queue.hpp"

namespace dearfsim {

struct PhyParams {
  std::uint64_t rate_bps = 650'000;  // MCS0
  std::uint64_t sifs_us = 160;
  std::uint64_t difs_us = 274;
  std::uint64_t backoff_slot_us = 52;
};

// Airtime of a frame at the configured rate, rounded up to the next
// microsecond so occupancy is never underestimated.
inline std::uint64_t tx_duration_us(std::uint64_t size_bytes, const PhyParams& p) {
  if (size_bytes == 0) throw std::invalid_argument("tx_duration_us: zero-size frame");
  if (p.rate_bps == 0) throw std::invalid_argument("tx_duration_us: zero rate");
  std::uint64_t bit_us = size_bytes * 8u * 1'000'000u;
  return (bit_us + p.rate_bps - 1) / p.rate_bps;
}

enum class PowerState : int { Tx = 0, Rx = 1, Idle = 2, Sleep = 3 };

struct PowerDraw {
  std::uint32_t tx_mw = 285;
  std::uint32_t rx_mw = 145;
  std::uint32_t idle_mw = 70;
  std::uint32_t sleep_mw = 5;

  std::uint32_t of(PowerState s) const {
    switch (s) {
      case PowerState::Tx: return tx_mw;
      case PowerState::Rx: return rx_mw;
      case PowerState::Idle: return idle_mw;
      default: return sleep_mw;
    }
  }

  void validate() const {
    if (!(tx_mw > rx_mw && rx_mw > idle_mw && idle_mw > sleep_mw)) {
      throw std::invalid_argument("power draws must satisfy Tx > Rx > Idle > Sleep");
    }
  }
};

// Per-device time and energy accounting. mW x us = nJ, so everything stays
// in exact integer arithmetic.
struct EnergyLedger {
  std::array<std::uint64_t, 4> time_us{};  // indexed by PowerState
  std::uint64_t energy_nj = 0;
  std::uint64_t awake_energy_nj = 0;  // Tx + Rx + Idle

  void add(PowerState s, std::uint64_t dur_us, const PowerDraw& d) {
    time_us[static_cast<int>(s)] += dur_us;
    std::uint64_t e = dur_us * d.of(s);
    energy_nj += e;
    if (s != PowerState::Sleep) awake_energy_nj += e;
  }

  std::uint64_t total_time_us() const {
    return time_us[0] + time_us[1] + time_us[2] + time_us[3];
  }

  std::uint64_t awake_time_us() const { return time_us[0] + time_us[1] + time_us[2]; }
};

enum class WindowKind : int { Generic = 0, Ci = 1, Dii = 2, Dra = 3, Nra = 4 };
enum class TxOutcome { Success, Collision };

struct TxRecord {
  std::uint32_t device;
  SimTime start;
  SimTime end;
  WindowKind kind;
  TxOutcome outcome;
};

// AP-side view of the shared half-duplex channel: a log of every data
// transmission with its outcome, plus per-window-kind collision event
// counters (one event per overlapping cluster, not per packet).
class Channel {
 public:
  void record(const TxRecord& r) { log_.push_back(r); }

  void record_collision_event(WindowKind k) {
    if (k == WindowKind::Dra || k == WindowKind::Dii) {
      throw std::logic_error("collision inside a contention-free window");
    }
    ++collision_events_[static_cast<int>(k)];
  }

  std::uint64_t collision_events(WindowKind k) const {
    return collision_events_[static_cast<int>(k)];
  }

  const std::vector<TxRecord>& log() const { return log_; }

 private:
  std::vector<TxRecord> log_;
  std::array<std::uint64_t, 5> collision_events_{};
};

}  // namespace dearfsim

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dearfsim/phy.hpp"
#include "dearfsim/traffic.hpp"

namespace dearfsim {

// Per-run evaluation record.
//
// Conventions: energy figures count awake (Tx/Rx/Idle) consumption; the
// sleep floor common to every device is excluded. Delay for deadline-scoped
// packets is measured at interval granularity (serving interval minus
// arrival interval), matching the deadline bookkeeping; delay for
// delay-tolerant packets is the exact arrival-to-service time. Averages are
// over successfully delivered packets.
struct RunSummary {
  // identity
  const char* scheme = "";
  std::uint32_t n_dsmd = 0;
  std::uint32_t x_dtims = 0;
  std::uint64_t seed = 0;
  std::uint32_t deadline_dtims = 0;

  // delay-sensitive counts
  std::uint64_t dsmd_arrived = 0;
  std::uint64_t dsmd_served = 0;  // always within deadline: expired packets leave the queue
  std::uint64_t dsmd_missed = 0;  // deadline expired unserved
  std::uint64_t dsmd_dropped = 0; // retry limit exceeded
  std::uint64_t dsmd_inflight = 0;

  // delay-tolerant counts
  std::uint64_t ndsmd_arrived = 0;
  std::uint64_t ndsmd_served = 0;
  std::uint64_t ndsmd_dropped = 0;
  std::uint64_t ndsmd_inflight = 0;

  double pdr_pct = std::nan("");                 // dsmd_served / dsmd_arrived * 100
  double dsmd_energy_per_packet_uj = std::nan("");
  double dsmd_energy_per_device_mj = std::nan("");
  double dsmd_delay_s = std::nan("");            // interval-granular
  double dsmd_active_time_s = std::nan("");
  double ndsmd_energy_per_packet_uj = std::nan("");
  double ndsmd_delay_s = std::nan("");

  std::vector<double> dsmd_delays_s;  // per delivered packet, interval-granular
};

inline void record_delivery(Packet& p, SimTime served_at, std::uint64_t dtim_interval_us) {
  if (p.fate != PacketFate::Pending) throw std::logic_error("packet recorded twice");
  if (served_at < p.arrival) throw std::logic_error("service before arrival");
  p.fate = PacketFate::Served;
  p.served_at = served_at;
  p.served_dtim = static_cast<std::uint32_t>(served_at / dtim_interval_us);
}

inline void record_expiry(Packet& p) {
  if (p.fate != PacketFate::Pending) throw std::logic_error("packet recorded twice");
  p.fate = PacketFate::Expired;
}

inline void record_drop(Packet& p) {
  if (p.fate != PacketFate::Pending) throw std::logic_error("packet recorded twice");
  p.fate = PacketFate::Dropped;
}

inline RunSummary summarize(const std::vector<Packet>& packets,
                            const std::vector<EnergyLedger>& dsmd_ledgers,
                            const char* scheme, std::uint32_t n_dsmd, std::uint32_t x_dtims,
                            std::uint64_t seed, std::uint64_t dtim_interval_us,
                            std::uint32_t deadline_dtims) {
  RunSummary s;
  s.scheme = scheme;
  s.n_dsmd = n_dsmd;
  s.x_dtims = x_dtims;
  s.seed = seed;
  s.deadline_dtims = deadline_dtims;

  double dsmd_energy = 0, dsmd_delay = 0, dsmd_active = 0;
  double nd_energy = 0, nd_delay = 0;
  for (const auto& p : packets) {
    if (p.has_deadline) {
      ++s.dsmd_arrived;
      switch (p.fate) {
        case PacketFate::Served: {
          ++s.dsmd_served;
          dsmd_energy += static_cast<double>(p.active_energy_nj);
          double delay_s = static_cast<double>(p.served_dtim - p.arrival_dtim) *
                           static_cast<double>(dtim_interval_us) * 1e-6;
          dsmd_delay += delay_s;
          s.dsmd_delays_s.push_back(delay_s);
          dsmd_active += static_cast<double>(p.active_us);
          break;
        }
        case PacketFate::Expired: ++s.dsmd_missed; break;
        case PacketFate::Dropped: ++s.dsmd_dropped; break;
        case PacketFate::Pending: ++s.dsmd_inflight; break;
      }
    } else {
      ++s.ndsmd_arrived;
      switch (p.fate) {
        case PacketFate::Served:
          ++s.ndsmd_served;
          nd_energy += static_cast<double>(p.active_energy_nj);
          nd_delay += static_cast<double>(p.served_at - p.arrival) * 1e-6;
          break;
        case PacketFate::Dropped: ++s.ndsmd_dropped; break;
        case PacketFate::Expired: throw std::logic_error("deadline on delay-tolerant packet");
        case PacketFate::Pending: ++s.ndsmd_inflight; break;
      }
    }
  }

  if (s.dsmd_arrived > 0)
    s.pdr_pct = 100.0 * static_cast<double>(s.dsmd_served) / static_cast<double>(s.dsmd_arrived);
  if (s.dsmd_served > 0) {
    s.dsmd_energy_per_packet_uj = dsmd_energy / static_cast<double>(s.dsmd_served) * 1e-3;
    s.dsmd_delay_s = dsmd_delay / static_cast<double>(s.dsmd_served);
    s.dsmd_active_time_s = dsmd_active / static_cast<double>(s.dsmd_served) * 1e-6;
  }
  if (!dsmd_ledgers.empty()) {
    double total = 0;
    for (const auto& l : dsmd_ledgers) total += static_cast<double>(l.awake_energy_nj);
    s.dsmd_energy_per_device_mj = total / static_cast<double>(dsmd_ledgers.size()) * 1e-6;
  }
  if (s.ndsmd_served > 0) {
    s.ndsmd_energy_per_packet_uj = nd_energy / static_cast<double>(s.ndsmd_served) * 1e-3;
    s.ndsmd_delay_s = nd_delay / static_cast<double>(s.ndsmd_served);
  }
  return s;
}

}  // namespace dearfsim

#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "dearfsim/config.hpp"
#include "dearfsim/event_queue.hpp"
#include "dearfsim/rng.hpp"

namespace dearfsim {

enum class PacketFate { Pending, Served, Expired, Dropped };

struct Packet {
  std::uint32_t id = 0;
  std::uint32_t owner = 0;  // device index
  SimTime arrival = 0;
  std::uint32_t size_bytes = 0;
  bool has_deadline = false;
  std::uint32_t arrival_dtim = 0;
  std::uint32_t expiry_dtim = 0;  // last interval in which service still counts
  std::uint32_t retries = 0;
  PacketFate fate = PacketFate::Pending;
  SimTime served_at = 0;
  std::uint32_t served_dtim = 0;
  // Awake time and energy the owner spent while this packet was at the
  // head of its queue.
  std::uint64_t active_us = 0;
  std::uint64_t active_energy_nj = 0;
};

// End of the interval deadline_dtims after the arrival interval.
inline SimTime expiry_instant(std::uint32_t arrival_dtim, std::uint32_t deadline_dtims,
                              std::uint64_t dtim_interval_us) {
  return static_cast<SimTime>(arrival_dtim + deadline_dtims + 1) * dtim_interval_us;
}

struct ScenarioSpec {
  std::uint32_t n_dsmd;
  std::uint32_t x_dtims;
  std::uint64_t seed;
};

// Uplink arrival schedule shared by both schemes for a given seed.
//
// Delay-sensitive devices: in the default one-shot model each device gets a
// single packet with arrival uniform over the first x_dtims intervals. In
// the cyclic model that window repeats back to back over the horizon, one
// packet per device per cycle. Delay-tolerant devices get one packet per
// interval, uniform within it, no deadline.
//
// Device indices: 0..n_dsmd-1 are delay sensitive, then n_non_dsmd more.
inline std::vector<Packet> generate_arrivals(const ScenarioSpec& spec, const Config& cfg) {
  std::vector<Packet> packets;
  const std::uint64_t L = cfg.dtim_interval_us;
  const std::uint64_t window = static_cast<std::uint64_t>(spec.x_dtims) * L;

  for (std::uint32_t d = 0; d < spec.n_dsmd; ++d) {
    Rng rng = Rng::stream(spec.seed, 0x100000000ull + d);
    for (std::uint64_t cycle_start = 0; cycle_start < cfg.sim_time_us;
         cycle_start += window) {
      SimTime at = cycle_start + rng.uniform(window);
      if (at < cfg.sim_time_us) {
        Packet p;
        p.owner = d;
        p.arrival = at;
        p.size_bytes = cfg.packet_bytes;
        p.has_deadline = true;
        p.arrival_dtim = static_cast<std::uint32_t>(at / L);
        p.expiry_dtim = p.arrival_dtim + cfg.deadline_dtims;
        packets.push_back(p);
      }
      if (cfg.arrival_model == "oneshot") break;
    }
  }
  for (std::uint32_t i = 0; i < cfg.n_non_dsmd; ++i) {
    std::uint32_t d = spec.n_dsmd + i;
    Rng rng = Rng::stream(spec.seed, 0x200000000ull + d);
    for (std::uint64_t dtim_start = 0; dtim_start < cfg.sim_time_us; dtim_start += L) {
      SimTime at = dtim_start + rng.uniform(L);
      if (at >= cfg.sim_time_us) continue;
      Packet p;
      p.owner = d;
      p.arrival = at;
      p.size_bytes = cfg.packet_bytes;
      p.has_deadline = false;
      p.arrival_dtim = static_cast<std::uint32_t>(at / L);
      packets.push_back(p);
    }
  }

  std::stable_sort(packets.begin(), packets.end(), [](const Packet& a, const Packet& b) {
    return a.arrival != b.arrival ? a.arrival < b.arrival : a.owner < b.owner;
  });
  for (std::uint32_t i = 0; i < packets.size(); ++i) packets[i].id = i;
  return packets;
}

}  // namespace dearfsim

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dearfsim/phy.hpp"

namespace dearfsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Scheme { Basic, Dearf };

inline const char* scheme_name(Scheme s) { return s == Scheme::Basic ? "basic" : "dearf"; }

// All simulation parameters, flat. File format: one `key = value` per line,
// `#` starts a comment, unknown keys are rejected.
struct Config {
  // Horizon and beacon structure
  std::uint64_t sim_time_us = 18'000'000;
  std::uint64_t dtim_interval_us = 1'600'000;
  std::uint32_t dtim_beacon_bytes = 102;
  std::uint32_t tim_beacon_bytes = 62;

  // PHY / DCF
  std::uint64_t phy_rate_bps = 650'000;
  std::uint64_t sifs_us = 160;
  std::uint64_t difs_us = 274;
  std::uint64_t backoff_slot_us = 52;
  std::uint32_t cw_min = 15;
  std::uint32_t cw_max = 1023;
  std::uint32_t retry_limit = 4;
  std::uint32_t packet_bytes = 100;
  std::uint32_t ack_bytes = 14;

  // Baseline access layout
  std::uint64_t raw_us = 200'000;
  std::uint64_t raw_slot_us = 19'000;
  std::uint32_t basic_group_count = 4;

  // Deadline-aware layout
  std::uint64_t ci_raw_us = 18'000;
  std::uint64_t ci_slot_us = 180;
  std::uint64_t dii_slot_us = 240;
  std::uint64_t dra_slot_us = 1'684;
  std::uint64_t nra_slot_us = 19'000;
  std::uint32_t ci_beacon_bytes = 10;
  std::uint32_t dii_packet_bytes = 10;
  std::uint64_t nra_min_us = 200'000;        // minimum per-interval budget for delay-tolerant devices
  std::uint64_t collision_threshold = 300;   // contention-based collision events per interval

  // Traffic
  std::uint32_t n_non_dsmd = 200;
  std::uint32_t deadline_dtims = 3;
  std::string arrival_model = "oneshot";  // oneshot | cyclic
  std::string offset_policy = "rotate";   // rotate | fixed
  std::uint64_t fixed_offset = 0;

  // Energy model
  std::uint32_t power_tx_mw = 285;
  std::uint32_t power_rx_mw = 145;
  std::uint32_t power_idle_mw = 70;
  std::uint32_t power_sleep_mw = 5;

  // Sweep matrix
  std::vector<std::string> schemes = {"basic", "dearf"};
  std::vector<std::uint32_t> dsmd_counts = {200, 400, 600, 800, 1000};
  std::vector<std::uint32_t> x_values = {1, 3, 5};
  std::uint32_t seeds = 1;
  std::uint64_t base_seed = 1;

  PhyParams phy() const { return {phy_rate_bps, sifs_us, difs_us, backoff_slot_us}; }
  PowerDraw draw() const { return {power_tx_mw, power_rx_mw, power_idle_mw, power_sleep_mw}; }

  std::uint64_t dtim_beacon_air_us() const { return tx_duration_us(dtim_beacon_bytes, phy()); }
  std::uint64_t tim_beacon_air_us() const { return tx_duration_us(tim_beacon_bytes, phy()); }
  std::uint64_t data_air_us() const { return tx_duration_us(packet_bytes, phy()); }
  std::uint64_t ack_air_us() const { return tx_duration_us(ack_bytes, phy()); }
  // Full data exchange: frame + SIFS + ack.
  std::uint64_t exchange_us() const { return data_air_us() + sifs_us + ack_air_us(); }

  std::uint32_t ci_group_count() const {
    return static_cast<std::uint32_t>(ci_raw_us / ci_slot_us);
  }

  void set(const std::string& key, const std::string& value);
  void validate(std::uint32_t max_dsmd_count) const;
  void print(std::ostream& os) const;
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    unsigned long long n = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing junk");
    return n;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for key '" + key + "': '" + v + "'");
  }
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

inline void Config::set(const std::string& key, const std::string& value) {
  using detail::parse_u64;
  auto u64 = [&](std::uint64_t& f) { f = parse_u64(key, value); };
  auto u32 = [&](std::uint32_t& f) { f = static_cast<std::uint32_t>(parse_u64(key, value)); };

  if (key == "sim_time_us") u64(sim_time_us);
  else if (key == "dtim_interval_us") u64(dtim_interval_us);
  else if (key == "dtim_beacon_bytes") u32(dtim_beacon_bytes);
  else if (key == "tim_beacon_bytes") u32(tim_beacon_bytes);
  else if (key == "phy_rate_bps") u64(phy_rate_bps);
  else if (key == "sifs_us") u64(sifs_us);
  else if (key == "difs_us") u64(difs_us);
  else if (key == "backoff_slot_us") u64(backoff_slot_us);
  else if (key == "cw_min") u32(cw_min);
  else if (key == "cw_max") u32(cw_max);
  else if (key == "retry_limit") u32(retry_limit);
  else if (key == "packet_bytes") u32(packet_bytes);
  else if (key == "ack_bytes") u32(ack_bytes);
  else if (key == "raw_us") u64(raw_us);
  else if (key == "raw_slot_us") u64(raw_slot_us);
  else if (key == "basic_group_count") u32(basic_group_count);
  else if (key == "ci_raw_us") u64(ci_raw_us);
  else if (key == "ci_slot_us") u64(ci_slot_us);
  else if (key == "dii_slot_us") u64(dii_slot_us);
  else if (key == "dra_slot_us") u64(dra_slot_us);
  else if (key == "nra_slot_us") u64(nra_slot_us);
  else if (key == "ci_beacon_bytes") u32(ci_beacon_bytes);
  else if (key == "dii_packet_bytes") u32(dii_packet_bytes);
  else if (key == "nra_min_us") u64(nra_min_us);
  else if (key == "collision_threshold") u64(collision_threshold);
  else if (key == "n_non_dsmd") u32(n_non_dsmd);
  else if (key == "deadline_dtims") u32(deadline_dtims);
  else if (key == "arrival_model") arrival_model = value;
  else if (key == "offset_policy") offset_policy = value;
  else if (key == "fixed_offset") u64(fixed_offset);
  else if (key == "power_tx_mw") u32(power_tx_mw);
  else if (key == "power_rx_mw") u32(power_rx_mw);
  else if (key == "power_idle_mw") u32(power_idle_mw);
  else if (key == "power_sleep_mw") u32(power_sleep_mw);
  else if (key == "schemes") schemes = detail::split_list(value);
  else if (key == "dsmd_counts") {
    dsmd_counts.clear();
    for (auto& s : detail::split_list(value))
      dsmd_counts.push_back(static_cast<std::uint32_t>(parse_u64(key, s)));
  } else if (key == "x_values") {
    x_values.clear();
    for (auto& s : detail::split_list(value))
      x_values.push_back(static_cast<std::uint32_t>(parse_u64(key, s)));
  } else if (key == "seeds") u32(seeds);
  else if (key == "base_seed") u64(base_seed);
  else throw ConfigError("unknown config key '" + key + "'");
}

inline void Config::validate(std::uint32_t max_dsmd_count) const {
  if (phy_rate_bps == 0) throw ConfigError("phy_rate_bps must be > 0");
  if (sifs_us >= difs_us) throw ConfigError("sifs_us must be < difs_us");
  if (backoff_slot_us == 0) throw ConfigError("backoff_slot_us must be > 0");
  draw().validate();
  if (dtim_interval_us == 0 || sim_time_us == 0) throw ConfigError("times must be > 0");
  if (raw_slot_us == 0 || raw_us < raw_slot_us) throw ConfigError("raw slot sizing invalid");
  if (basic_group_count == 0) throw ConfigError("basic_group_count must be > 0");
  // cw ladder: cw_max reachable from cw_min by (cw+1)*2-1 doubling
  std::uint32_t cw = cw_min;
  while (cw < cw_max) cw = (cw + 1) * 2 - 1;
  if (cw != cw_max) throw ConfigError("cw_max not on the doubling ladder from cw_min");
  if (ci_slot_us == 0 || ci_raw_us < ci_slot_us) throw ConfigError("ci slot sizing invalid");
  if (tx_duration_us(ci_beacon_bytes, phy()) > ci_slot_us)
    throw ConfigError("ci beacon does not fit a ci slot");
  if (tx_duration_us(dii_packet_bytes, phy()) > dii_slot_us)
    throw ConfigError("report packet does not fit a dii slot");
  if (exchange_us() >= dra_slot_us)
    throw ConfigError("data exchange does not fit a dra slot");
  if (exchange_us() + difs_us >= raw_slot_us || exchange_us() + difs_us >= nra_slot_us)
    throw ConfigError("data exchange does not fit a contention slot");
  if (deadline_dtims < 1) throw ConfigError("deadline_dtims must be >= 1");
  if (arrival_model != "oneshot" && arrival_model != "cyclic")
    throw ConfigError("arrival_model must be oneshot or cyclic");
  if (offset_policy != "rotate" && offset_policy != "fixed")
    throw ConfigError("offset_policy must be rotate or fixed");
  for (auto x : x_values)
    if (x < 1) throw ConfigError("x values must be >= 1");
  for (auto& s : schemes)
    if (s != "basic" && s != "dearf") throw ConfigError("unknown scheme '" + s + "'");
  if (seeds == 0) throw ConfigError("seeds must be >= 1");
  // The deadline-aware layout must always be able to honor the minimum
  // contention-based budget after beacons, the indication window and the
  // worst-case report window are reserved.
  std::uint64_t reserve = dtim_beacon_air_us() + ci_raw_us + tim_beacon_air_us() +
                          static_cast<std::uint64_t>(max_dsmd_count) * dii_slot_us;
  if (reserve + nra_min_us + tim_beacon_air_us() + nra_slot_us > dtim_interval_us) {
    throw ConfigError("dtim_interval_us too small for reserved windows plus nra_min_us");
  }
}

inline Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    try {
      cfg.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

inline void Config::print(std::ostream& os) const {
  auto join32 = [](const std::vector<std::uint32_t>& v) {
    std::string s;
    for (auto x : v) {
      if (!s.empty()) s += ",";
      s += std::to_string(x);
    }
    return s;
  };
  std::string schemes_s;
  for (auto& s : schemes) {
    if (!schemes_s.empty()) schemes_s += ",";
    schemes_s += s;
  }
  os << "# horizon and beacons\n"
     << "sim_time_us = " << sim_time_us << "            # 18 s horizon\n"
     << "dtim_interval_us = " << dtim_interval_us << "       # 1.6 s scheduling period\n"
     << "dtim_beacon_bytes = " << dtim_beacon_bytes << "\n"
     << "tim_beacon_bytes = " << tim_beacon_bytes << "\n"
     << "# phy / dcf\n"
     << "phy_rate_bps = " << phy_rate_bps << "            # MCS0\n"
     << "sifs_us = " << sifs_us << "\n"
     << "difs_us = " << difs_us << "\n"
     << "backoff_slot_us = " << backoff_slot_us << "          # long-preamble aSlotTime\n"
     << "cw_min = " << cw_min << "\n"
     << "cw_max = " << cw_max << "\n"
     << "retry_limit = " << retry_limit << "\n"
     << "packet_bytes = " << packet_bytes << "\n"
     << "ack_bytes = " << ack_bytes << "\n"
     << "# baseline access layout\n"
     << "raw_us = " << raw_us << "\n"
     << "raw_slot_us = " << raw_slot_us << "\n"
     << "basic_group_count = " << basic_group_count << "\n"
     << "# deadline-aware layout\n"
     << "ci_raw_us = " << ci_raw_us << "\n"
     << "ci_slot_us = " << ci_slot_us << "\n"
     << "dii_slot_us = " << dii_slot_us << "\n"
     << "dra_slot_us = " << dra_slot_us << "\n"
     << "nra_slot_us = " << nra_slot_us << "\n"
     << "ci_beacon_bytes = " << ci_beacon_bytes << "\n"
     << "dii_packet_bytes = " << dii_packet_bytes << "\n"
     << "nra_min_us = " << nra_min_us << "           # minimum contention-based budget per interval\n"
     << "collision_threshold = " << collision_threshold << "\n"
     << "# traffic\n"
     << "n_non_dsmd = " << n_non_dsmd << "\n"
     << "deadline_dtims = " << deadline_dtims << "\n"
     << "arrival_model = " << arrival_model << "\n"
     << "offset_policy = " << offset_policy << "\n"
     << "fixed_offset = " << fixed_offset << "\n"
     << "# energy model (mW)\n"
     << "power_tx_mw = " << power_tx_mw << "\n"
     << "power_rx_mw = " << power_rx_mw << "\n"
     << "power_idle_mw = " << power_idle_mw << "\n"
     << "power_sleep_mw = " << power_sleep_mw << "\n"
     << "# sweep matrix\n"
     << "schemes = " << schemes_s << "\n"
     << "dsmd_counts = " << join32(dsmd_counts) << "\n"
     << "x_values = " << join32(x_values) << "\n"
     << "seeds = " << seeds << "\n"
     << "base_seed = " << base_seed << "\n";
}

}  // namespace dearfsim

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dearfsim/metrics.hpp"

namespace dearfsim {

// Results CSV contract: fixed header, '.' decimal separator, LF line
// endings, six fractional digits, literal "nan" for undefined averages.
// Output is byte-identical across re-runs with the same seed set.
inline const char* kCsvHeader =
    "scheme,n_dsmd,x,seed,deadline_dtims,"
    "dsmd_arrived,dsmd_served,dsmd_missed,dsmd_dropped,dsmd_inflight,"
    "ndsmd_arrived,ndsmd_served,ndsmd_dropped,ndsmd_inflight,"
    "pdr_pct,dsmd_energy_per_packet_uj,dsmd_energy_per_device_mj,"
    "dsmd_delay_s,dsmd_active_time_s,ndsmd_energy_per_packet_uj,ndsmd_delay_s";

inline std::string csv_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline void write_csv_row(std::ostream& os, const RunSummary& s) {
  os << s.scheme << ',' << s.n_dsmd << ',' << s.x_dtims << ',' << s.seed << ','
     << s.deadline_dtims << ',' << s.dsmd_arrived << ',' << s.dsmd_served << ','
     << s.dsmd_missed << ',' << s.dsmd_dropped << ',' << s.dsmd_inflight << ','
     << s.ndsmd_arrived << ',' << s.ndsmd_served << ',' << s.ndsmd_dropped << ','
     << s.ndsmd_inflight << ',' << csv_double(s.pdr_pct) << ','
     << csv_double(s.dsmd_energy_per_packet_uj) << ','
     << csv_double(s.dsmd_energy_per_device_mj) << ',' << csv_double(s.dsmd_delay_s) << ','
     << csv_double(s.dsmd_active_time_s) << ','
     << csv_double(s.ndsmd_energy_per_packet_uj) << ',' << csv_double(s.ndsmd_delay_s)
     << '\n';
}

inline void write_csv(std::ostream& os, const std::vector<RunSummary>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) write_csv_row(os, r);
}

// Row as read back from a results file. Strings own their storage here,
// unlike RunSummary whose scheme is a static name.
struct CsvRow {
  std::string scheme;
  std::uint32_t n_dsmd = 0;
  std::uint32_t x = 0;
  std::uint64_t seed = 0;
  std::uint32_t deadline_dtims = 0;
  std::uint64_t dsmd_arrived = 0, dsmd_served = 0, dsmd_missed = 0, dsmd_dropped = 0,
                dsmd_inflight = 0;
  std::uint64_t ndsmd_arrived = 0, ndsmd_served = 0, ndsmd_dropped = 0, ndsmd_inflight = 0;
  double pdr_pct = std::nan("");
  double dsmd_energy_per_packet_uj = std::nan("");
  double dsmd_energy_per_device_mj = std::nan("");
  double dsmd_delay_s = std::nan("");
  double dsmd_active_time_s = std::nan("");
  double ndsmd_energy_per_packet_uj = std::nan("");
  double ndsmd_delay_s = std::nan("");
};

inline std::vector<CsvRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty results file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::runtime_error("unexpected results header");
  std::vector<CsvRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 21)
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected 21 fields");
    CsvRow r;
    std::size_t i = 0;
    auto u64 = [&] { return std::stoull(f[i++]); };
    auto dbl = [&] {
      const std::string& s = f[i++];
      return s == "nan" ? std::nan("") : std::stod(s);
    };
    r.scheme = f[i++];
    r.n_dsmd = static_cast<std::uint32_t>(u64());
    r.x = static_cast<std::uint32_t>(u64());
    r.seed = u64();
    r.deadline_dtims = static_cast<std::uint32_t>(u64());
    r.dsmd_arrived = u64();
    r.dsmd_served = u64();
    r.dsmd_missed = u64();
    r.dsmd_dropped = u64();
    r.dsmd_inflight = u64();
    r.ndsmd_arrived = u64();
    r.ndsmd_served = u64();
    r.ndsmd_dropped = u64();
    r.ndsmd_inflight = u64();
    r.pdr_pct = dbl();
    r.dsmd_energy_per_packet_uj = dbl();
    r.dsmd_energy_per_device_mj = dbl();
    r.dsmd_delay_s = dbl();
    r.dsmd_active_time_s = dbl();
    r.ndsmd_energy_per_packet_uj = dbl();
    r.ndsmd_delay_s = dbl();
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<CsvRow> read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results file: " + path);
  return read_csv(in);
}

// Seed-averaged metrics for one (scheme, n_dsmd, x) cell.
struct CellAverage {
  std::uint64_t runs = 0;
  double pdr_pct = 0;
  double dsmd_energy_per_packet_uj = 0;
  double dsmd_energy_per_device_mj = 0;
  double dsmd_delay_s = 0;
  double dsmd_active_time_s = 0;
  double ndsmd_energy_per_packet_uj = 0;
  double ndsmd_delay_s = 0;
};

using CellKey = std::tuple<std::string, std::uint32_t, std::uint32_t>;  // scheme, n, x

inline std::map<CellKey, CellAverage> average_cells(const std::vector<CsvRow>& rows) {
  struct Acc {
    CellAverage sum;
    std::uint64_t pdr_n = 0, ep_n = 0, ed_n = 0, dl_n = 0, at_n = 0, nep_n = 0, ndl_n = 0;
  };
  std::map<CellKey, Acc> acc;
  for (const auto& r : rows) {
    Acc& a = acc[{r.scheme, r.n_dsmd, r.x}];
    ++a.sum.runs;
    auto add = [](double v, double& sum, std::uint64_t& n) {
      if (!std::isnan(v)) {
        sum += v;
        ++n;
      }
    };
    add(r.pdr_pct, a.sum.pdr_pct, a.pdr_n);
    add(r.dsmd_energy_per_packet_uj, a.sum.dsmd_energy_per_packet_uj, a.ep_n);
    add(r.dsmd_energy_per_device_mj, a.sum.dsmd_energy_per_device_mj, a.ed_n);
    add(r.dsmd_delay_s, a.sum.dsmd_delay_s, a.dl_n);
    add(r.dsmd_active_time_s, a.sum.dsmd_active_time_s, a.at_n);
    add(r.ndsmd_energy_per_packet_uj, a.sum.ndsmd_energy_per_packet_uj, a.nep_n);
    add(r.ndsmd_delay_s, a.sum.ndsmd_delay_s, a.ndl_n);
  }
  std::map<CellKey, CellAverage> out;
  for (auto& [k, a] : acc) {
    CellAverage c = a.sum;
    auto avg = [](double sum, std::uint64_t n) { return n ? sum / static_cast<double>(n) : std::nan(""); };
    c.pdr_pct = avg(a.sum.pdr_pct, a.pdr_n);
    c.dsmd_energy_per_packet_uj = avg(a.sum.dsmd_energy_per_packet_uj, a.ep_n);
    c.dsmd_energy_per_device_mj = avg(a.sum.dsmd_energy_per_device_mj, a.ed_n);
    c.dsmd_delay_s = avg(a.sum.dsmd_delay_s, a.dl_n);
    c.dsmd_active_time_s = avg(a.sum.dsmd_active_time_s, a.at_n);
    c.ndsmd_energy_per_packet_uj = avg(a.sum.ndsmd_energy_per_packet_uj, a.nep_n);
    c.ndsmd_delay_s = avg(a.sum.ndsmd_delay_s, a.ndl_n);
    out[k] = c;
  }
  return out;
}

// Scheme comparison per (n_dsmd, x): savings computed as
// (baseline - deadline_aware) / deadline_aware * 100.
inline void write_comparison(std::ostream& os, const std::vector<CsvRow>& rows) {
  auto cells = average_cells(rows);
  auto pct = [](double base, double ours) {
    if (std::isnan(base) || std::isnan(ours) || ours == 0) return std::nan("");
    return (base - ours) / ours * 100.0;
  };
  os << "n_dsmd,x,"
     << "pdr_basic_pct,pdr_dearf_pct,"
     << "epkt_basic_uj,epkt_dearf_uj,epkt_savings_pct,"
     << "edev_basic_mj,edev_dearf_mj,edev_savings_pct,"
     << "delay_basic_s,delay_dearf_s,"
     << "active_basic_s,active_dearf_s,"
     << "nd_epkt_basic_uj,nd_epkt_dearf_uj,nd_epkt_savings_pct,"
     << "nd_delay_basic_s,nd_delay_dearf_s\n";
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<const CellAverage*, const CellAverage*>>
      pairs;
  for (auto& [k, v] : cells) {
    auto& slot = pairs[{std::get<1>(k), std::get<2>(k)}];
    if (std::get<0>(k) == "basic") slot.first = &v;
    else if (std::get<0>(k) == "dearf") slot.second = &v;
  }
  for (auto& [nx, pr] : pairs) {
    if (!pr.first || !pr.second) continue;
    const CellAverage& b = *pr.first;
    const CellAverage& d = *pr.second;
    os << nx.first << ',' << nx.second << ',' << csv_double(b.pdr_pct) << ','
       << csv_double(d.pdr_pct) << ',' << csv_double(b.dsmd_energy_per_packet_uj) << ','
       << csv_double(d.dsmd_energy_per_packet_uj) << ','
       << csv_double(pct(b.dsmd_energy_per_packet_uj, d.dsmd_energy_per_packet_uj)) << ','
       << csv_double(b.dsmd_energy_per_device_mj) << ','
       << csv_double(d.dsmd_energy_per_device_mj) << ','
       << csv_double(pct(b.dsmd_energy_per_device_mj, d.dsmd_energy_per_device_mj)) << ','
       << csv_double(b.dsmd_delay_s) << ',' << csv_double(d.dsmd_delay_s) << ','
       << csv_double(b.dsmd_active_time_s) << ',' << csv_double(d.dsmd_active_time_s) << ','
       << csv_double(b.ndsmd_energy_per_packet_uj) << ','
       << csv_double(d.ndsmd_energy_per_packet_uj) << ','
       << csv_double(pct(b.ndsmd_energy_per_packet_uj, d.ndsmd_energy_per_packet_uj)) << ','
       << csv_double(b.ndsmd_delay_s) << ',' << csv_double(d.ndsmd_delay_s) << '\n';
  }
}

}  // namespace dearfsim

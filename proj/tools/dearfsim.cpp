// Command-line runner: executes the (scheme x device-count x arrival-window
// x seed) sweep and writes results.csv plus a machine-readable manifest, or
// compares the two schemes from an existing results file.
//
// Exit codes: 0 success, 2 configuration error, 3 simulation failure.

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dearfsim/csv.hpp"
#include "dearfsim/simulation.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

struct SweepPoint {
  dearfsim::Scheme scheme;
  std::uint32_t n_dsmd;
  std::uint32_t x;
  std::uint64_t seed;
};

std::vector<SweepPoint> sweep_points(const dearfsim::Config& cfg) {
  std::vector<SweepPoint> pts;
  for (const auto& s : cfg.schemes) {
    dearfsim::Scheme scheme = s == "basic" ? dearfsim::Scheme::Basic : dearfsim::Scheme::Dearf;
    for (auto n : cfg.dsmd_counts)
      for (auto x : cfg.x_values)
        for (std::uint32_t i = 0; i < cfg.seeds; ++i)
          pts.push_back({scheme, n, x, cfg.base_seed + i});
  }
  return pts;
}

int run_sweep(const dearfsim::Config& cfg, const std::string& out_dir, unsigned jobs) {
  auto pts = sweep_points(cfg);
  std::vector<dearfsim::RunSummary> rows(pts.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex err_mu;
  std::string first_error;

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= pts.size() || failed.load()) return;
      const auto& p = pts[i];
      try {
        dearfsim::Simulation sim(cfg, p.scheme, {p.n_dsmd, p.x, p.seed});
        rows[i] = sim.run();
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!failed.exchange(true)) {
          first_error = std::string("run (") + dearfsim::scheme_name(p.scheme) + ", n=" +
                        std::to_string(p.n_dsmd) + ", x=" + std::to_string(p.x) +
                        ", seed=" + std::to_string(p.seed) + ") failed: " + e.what();
        }
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) {
    std::cerr << "error: " << first_error << "\n";
    return 3;
  }

  // Rows come out in sweep order regardless of worker scheduling, so the
  // file is byte-identical across runs and job counts.
  std::filesystem::create_directories(out_dir);
  std::string csv_path = out_dir + "/results.csv";
  {
    std::ofstream os(csv_path, std::ios::binary);
    if (!os) {
      std::cerr << "error: cannot write " << csv_path << "\n";
      return 3;
    }
    dearfsim::write_csv(os, rows);
  }
  {
    nlohmann::json m;
    m["version"] = kVersion;
    std::ostringstream cfg_echo;
    cfg.print(cfg_echo);
    m["config"] = cfg_echo.str();
    m["schemes"] = cfg.schemes;
    m["dsmd_counts"] = cfg.dsmd_counts;
    m["x_values"] = cfg.x_values;
    std::vector<std::uint64_t> seed_list;
    for (std::uint32_t i = 0; i < cfg.seeds; ++i) seed_list.push_back(cfg.base_seed + i);
    m["seeds"] = seed_list;
    m["rows"] = rows.size();
    m["results"] = "results.csv";
    std::ofstream ms(out_dir + "/manifest.json", std::ios::binary);
    ms << m.dump(2) << "\n";
  }
  std::cout << "wrote " << rows.size() << " rows to " << csv_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scheduled-access MAC simulator: baseline vs deadline-aware uplink access"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = "out";
  unsigned seeds_override = 0;
  bool print_config = false;
  unsigned jobs = 1;
  app.add_option("--config", config_path, "Configuration file (key = value lines)");
  app.add_option("--set", overrides, "Override a config key, KEY=VALUE (repeatable)");
  app.add_option("--out", out_dir, "Output directory for results.csv and manifest.json");
  app.add_option("--seeds", seeds_override, "Override the number of seeds");
  app.add_flag("--print-config", print_config, "Print the effective configuration and exit");
  app.add_option("--jobs", jobs, "Worker threads for independent sweep points")
      ->check(CLI::Range(1u, 256u));

  auto* compare_cmd = app.add_subcommand("compare", "Scheme comparison from a results file");
  std::string compare_csv;
  std::string compare_out;
  compare_cmd->add_option("csv", compare_csv, "results.csv produced by a sweep")->required();
  compare_cmd->add_option("--out", compare_out, "Write the comparison here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  if (compare_cmd->parsed()) {
    try {
      auto rows = dearfsim::read_csv_file(compare_csv);
      if (!compare_out.empty()) {
        std::ofstream os(compare_out, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + compare_out);
        dearfsim::write_comparison(os, rows);
      } else {
        dearfsim::write_comparison(std::cout, rows);
      }
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 3;
    }
    return 0;
  }

  dearfsim::Config cfg;
  try {
    if (!config_path.empty()) cfg = dearfsim::load_config_file(config_path);
    for (const auto& ov : overrides) {
      auto eq = ov.find('=');
      if (eq == std::string::npos)
        throw dearfsim::ConfigError("--set expects KEY=VALUE, got '" + ov + "'");
      cfg.set(ov.substr(0, eq), ov.substr(eq + 1));
    }
    if (seeds_override > 0) cfg.seeds = seeds_override;
    std::uint32_t max_n = 0;
    for (auto n : cfg.dsmd_counts) max_n = std::max(max_n, n);
    cfg.validate(max_n);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (print_config) {
    cfg.print(std::cout);
    return 0;
  }
  return run_sweep(cfg, out_dir, jobs);
}

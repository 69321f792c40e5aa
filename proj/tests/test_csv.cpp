#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "dearfsim/csv.hpp"

using namespace dearfsim;

namespace {

RunSummary sample(const char* scheme, std::uint32_t n, std::uint32_t x, std::uint64_t seed,
                  double pdr, double epkt) {
  RunSummary s;
  s.scheme = scheme;
  s.n_dsmd = n;
  s.x_dtims = x;
  s.seed = seed;
  s.deadline_dtims = 5;
  s.dsmd_arrived = n;
  s.dsmd_served = static_cast<std::uint64_t>(pdr / 100.0 * n);
  s.pdr_pct = pdr;
  s.dsmd_energy_per_packet_uj = epkt;
  s.dsmd_energy_per_device_mj = epkt / 1000.0;
  s.dsmd_delay_s = 3.2;
  s.dsmd_active_time_s = 0.01;
  s.ndsmd_energy_per_packet_uj = epkt * 2;
  s.ndsmd_delay_s = 0.5;
  return s;
}

}  // namespace

TEST_CASE("csv round trip") {
  std::vector<RunSummary> rows{sample("basic", 200, 5, 1, 92.5, 1000.0),
                               sample("dearf", 200, 5, 1, 100.0, 800.0)};
  rows[0].dsmd_delay_s = std::nan("");
  std::stringstream ss;
  write_csv(ss, rows);

  auto first_line = ss.str().substr(0, ss.str().find('\n'));
  REQUIRE(first_line == kCsvHeader);
  REQUIRE(ss.str().find("nan") != std::string::npos);
  REQUIRE(ss.str().find("92.500000") != std::string::npos);

  auto back = read_csv(ss);
  REQUIRE(back.size() == 2);
  REQUIRE(back[0].scheme == "basic");
  REQUIRE(back[0].pdr_pct == Catch::Approx(92.5));
  REQUIRE(std::isnan(back[0].dsmd_delay_s));
  REQUIRE(back[1].scheme == "dearf");
  REQUIRE(back[1].dsmd_energy_per_packet_uj == Catch::Approx(800.0));
}

TEST_CASE("write is byte-identical across calls") {
  std::vector<RunSummary> rows{sample("dearf", 1000, 1, 3, 81.25, 123.456789)};
  std::stringstream a, b;
  write_csv(a, rows);
  write_csv(b, rows);
  REQUIRE(a.str() == b.str());
  REQUIRE(a.str().find("\r") == std::string::npos);  // LF only
}

TEST_CASE("malformed input is rejected") {
  std::stringstream empty;
  REQUIRE_THROWS(read_csv(empty));
  std::stringstream bad_header("not,a,header\n");
  REQUIRE_THROWS(read_csv(bad_header));
  std::stringstream short_row(std::string(kCsvHeader) + "\nbasic,200\n");
  REQUIRE_THROWS(read_csv(short_row));
}

TEST_CASE("comparison averages seeds and computes savings") {
  std::vector<RunSummary> rows{
      sample("basic", 200, 5, 1, 90.0, 1200.0), sample("basic", 200, 5, 2, 94.0, 1000.0),
      sample("dearf", 200, 5, 1, 100.0, 500.0), sample("dearf", 200, 5, 2, 100.0, 600.0)};
  std::stringstream ss;
  write_csv(ss, rows);
  auto back = read_csv(ss);

  std::stringstream cmp;
  write_comparison(cmp, back);
  std::string out = cmp.str();
  // basic pdr mean 92, dearf 100; energy/packet savings (1100-550)/550 = 100%.
  REQUIRE(out.find("200,5,92.000000,100.000000") != std::string::npos);
  REQUIRE(out.find(",100.000000,") != std::string::npos);

  // identical schemes -> zero savings
  std::vector<RunSummary> same{sample("basic", 400, 1, 1, 50.0, 700.0),
                               sample("dearf", 400, 1, 1, 50.0, 700.0)};
  std::stringstream ss2;
  write_csv(ss2, same);
  std::stringstream cmp2;
  write_comparison(cmp2, read_csv(ss2));
  REQUIRE(cmp2.str().find(",0.000000,") != std::string::npos);

  // unpaired rows are skipped
  std::vector<RunSummary> lone{sample("basic", 600, 1, 1, 50.0, 700.0)};
  std::stringstream ss3;
  write_csv(ss3, lone);
  std::stringstream cmp3;
  write_comparison(cmp3, read_csv(ss3));
  REQUIRE(cmp3.str().find("600") == std::string::npos);
}

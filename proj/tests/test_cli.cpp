// Drives the installed binary end to end: exit codes, file shapes,
// determinism of emitted artifacts.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "isl/io.hpp"
#include "isl/metrics.hpp"

namespace fs = std::filesystem;

namespace {

std::string binary_path() {
  const char* bin = std::getenv("ISLSYNC_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "ISLSYNC_BIN must point at the CLI binary");
  return bin;
}

int run(const std::string& args) {
  const std::string cmd = binary_path() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("islsync_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("definitely-not-a-subcommand") == 2);
  CHECK(run("mc --no-such-flag") == 2);
  CHECK(run("") == 2);
}

TEST_CASE("missing config file exits with code 2") {
  const fs::path dir = fresh_dir("badcfg");
  CHECK(run("pcrb --config /nonexistent/params.json --out " + dir.string()) == 2);
}

TEST_CASE("pcrb emits bound curves with metadata") {
  const fs::path dir = fresh_dir("pcrb");
  REQUIRE(run("pcrb --out " + dir.string() + " --epochs 120") == 0);

  const auto lines = read_lines(dir / "pcrb.csv");
  REQUIRE(lines.size() >= 122);
  CHECK(lines[0].rfind("# islsync v", 0) == 0);
  CHECK(lines[1] == "k,pcrb_R,pcrb_Rdot,pcrb_b,pcrb_u,pcrb_theta,lambda_min");
  CHECK(fs::exists(dir / "pcrb_kappa0.csv"));

  // Steady-state phase bound near the reference value (variance units).
  std::istringstream last(lines[101]);  // epoch 99 row: header + meta + 100 rows
  std::string cell;
  std::vector<std::string> cells;
  while (std::getline(last, cell, ',')) {
    cells.push_back(cell);
  }
  REQUIRE(cells.size() == 7);
  const double pcrb_theta = std::stod(cells[5]);
  CHECK(std::abs(pcrb_theta - 21.2 * 21.2) / (21.2 * 21.2) < 0.10);
}

TEST_CASE("decoupled pcrb follows the closed form") {
  const fs::path dir = fresh_dir("pcrb0");
  REQUIRE(run("pcrb --kappa-zero --out " + dir.string() + " --epochs 50") == 0);
  const auto lines = read_lines(dir / "pcrb.csv");
  const double q_theta = 2.0 * 3.14159265358979 * 100.0 * 0.1;
  for (int k = 0; k < 48; ++k) {
    std::istringstream row(lines[static_cast<std::size_t>(k) + 2]);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) {
      cells.push_back(cell);
    }
    const double expected = 1.0 + k * q_theta;
    CHECK(std::abs(std::stod(cells[5]) - expected) / expected < 1e-6);
  }
}

TEST_CASE("prop1 writes the comparison series") {
  const fs::path dir = fresh_dir("prop1");
  REQUIRE(run("prop1 --out " + dir.string() + " --epochs 60") == 0);
  const auto lines = read_lines(dir / "prop1.csv");
  CHECK(lines[1] ==
        "k,j_theta_scalar,j_theta_full_kappa0,pcrb_theta_kappa0,pcrb_theta_closed,"
        "pcrb_theta_tasd");
  CHECK(lines.size() == 62);
}

TEST_CASE("simulate writes trajectory and measurements") {
  const fs::path dir = fresh_dir("sim");
  REQUIRE(run("simulate --out " + dir.string() + " --epochs 40 --seed 9") == 0);
  const auto traj = read_lines(dir / "trajectory.csv");
  CHECK(traj[1] == "k,r,r_dot,b,u,theta");
  CHECK(traj.size() == 42);
  const auto meas = read_lines(dir / "measurements.csv");
  CHECK(meas[1] == "k,y_r,y_d,doppler_outlier");
  CHECK(meas.size() == 41);  // epochs 1..39
}

TEST_CASE("mc writes the full artifact set deterministically") {
  const fs::path dir_a = fresh_dir("mc_a");
  const fs::path dir_b = fresh_dir("mc_b");
  const std::string common = " --scenario nominal --trials 40 --epochs 60 --seed 7";
  REQUIRE(run("mc --out " + dir_a.string() + common) == 0);
  REQUIRE(run("mc --out " + dir_b.string() + common + " --workers 3") == 0);

  for (const char* name :
       {"report.json", "table2.csv", "p95_summary.csv", "cdf_nominal_standard.csv",
        "cdf_nominal_gate.csv", "cdf_nominal_huber.csv", "cdf_nominal_hybrid.csv"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(dir_a / name));
    CHECK(isl::read_text_file((dir_a / name).string()) ==
          isl::read_text_file((dir_b / name).string()));
  }

  const auto table = read_lines(dir_a / "table2.csv");
  REQUIRE(table.size() == 7);  // meta + header + 5 state rows
  CHECK(table[1] == "state,sqrt_pcrb,rmse,eta");

  const auto p95 = read_lines(dir_a / "p95_summary.csv");
  CHECK(p95[1] == "scenario,variant,p95,reduction_pct");
  CHECK(p95.size() == 6);
}

TEST_CASE("mc can dump per-epoch trial diagnostics") {
  const fs::path dir = fresh_dir("mc_diag");
  REQUIRE(run("mc --out " + dir.string() +
              " --trials 5 --epochs 30 --seed 2 --dump-trial 1") == 0);
  const auto lines = read_lines(dir / "trial_1_diag.csv");
  CHECK(lines[1] ==
        "k,variant,err_R,err_Rdot,err_b,err_u,err_theta,r_tilde,outcome,weight");
  // 4 variants x 29 measurement epochs plus meta and header.
  CHECK(lines.size() == 2 + 4 * 29);
  CHECK(lines[2].rfind("1,standard,", 0) == 0);
}

TEST_CASE("report prints the tables from report.json") {
  const fs::path dir = fresh_dir("report");
  REQUIRE(run("mc --out " + dir.string() + " --trials 25 --epochs 50 --seed 3") == 0);

  const std::string out_file = (dir / "console.txt").string();
  const std::string cmd = binary_path() + " report --out " + dir.string() + " > " +
                          out_file + " 2>/dev/null";
  REQUIRE(std::system(cmd.c_str()) == 0);
  const std::string text = isl::read_text_file(out_file);
  CHECK(text.find("theta [rad]") != std::string::npos);
  CHECK(text.find("hybrid") != std::string::npos);

  // Printed efficiency matches the report to three decimals.
  const auto report = isl::load_report((dir / "report.json").string());
  char expected[32];
  std::snprintf(expected, sizeof expected, "%8.3f",
                report.variant("standard").eta[4]);
  CHECK(text.find(expected) != std::string::npos);
}

TEST_CASE("report on a missing or empty file exits with code 2") {
  const fs::path dir = fresh_dir("noreport");
  CHECK(run("report --out " + dir.string()) == 2);
  std::ofstream(dir / "report.json").close();
  CHECK(run("report --out " + dir.string()) == 2);
}

TEST_CASE("impulsive mc shows the hybrid reduction") {
  const fs::path dir = fresh_dir("mc_imp");
  REQUIRE(run("mc --out " + dir.string() +
              " --scenario impulsive --trials 120 --epochs 100 --seed 1") == 0);
  const auto report = isl::load_report((dir / "report.json").string());
  CHECK(report.variant("hybrid").reduction_pct >= 85.0);
}

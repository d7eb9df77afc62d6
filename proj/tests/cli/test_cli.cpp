#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "facetflow/app/commands.hpp"
#include "facetflow/app/config.hpp"
#include "facetflow/app/snapshot.hpp"
#include "facetflow/error.hpp"

namespace fs = std::filesystem;
namespace app = facetflow::app;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "facetflow_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

app::RunConfig config(const std::string& name) {
  return app::load_run_config(fs::path(FACETFLOW_CONFIG_DIR) / (name + ".conf"));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

struct Exec {
  int status = 0;
  std::string output;
};

// Runs the facetflow binary with stderr folded into the captured output.
Exec run_tool(const std::string& args) {
  const std::string cmd = std::string(FACETFLOW_EXE) + " " + args + " 2>&1";
  Exec r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, "popen failed"};
  std::array<char, 256> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
  r.status = pclose(pipe);
  return r;
}

const app::CheckResult& find_check(const std::vector<app::CheckResult>& checks, const std::string& name) {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::runtime_error("no check " + name);
}

}  // namespace

TEST(CliRun, RerunIsByteIdentical) {
  auto cfg = config("generic_1d");
  cfg.j = 8;
  cfg.stepper.tau = cfg.T / 8;
  const fs::path a = scratch("rerun_a");
  const fs::path b = scratch("rerun_b");
  cfg.output_dir = a.string();
  ASSERT_EQ(app::cmd_run(cfg), 0);
  cfg.output_dir = b.string();
  ASSERT_EQ(app::cmd_run(cfg), 0);
  for (const char* name : {"diagnostics.csv", "weak_residual.csv"}) {
    const std::string first = slurp(a / name);
    EXPECT_FALSE(first.empty()) << name;
    EXPECT_EQ(first, slurp(b / name)) << name;
  }
  for (const auto& entry : fs::directory_iterator(a / "snapshots")) {
    auto sa = app::read_snapshot(entry.path());
    auto sb = app::read_snapshot(b / "snapshots" / entry.path().filename());
    sa.wall_time = sb.wall_time = 0.0;
    EXPECT_EQ(sa, sb) << entry.path().filename();
  }
}

TEST(CliRun, SteadySnapshotsAndEnergyAreConstant) {
  auto cfg = config("steady_unit");
  cfg.j = 10;
  cfg.stepper.tau = cfg.T / 10;
  cfg.snapshot_stride = 1;
  cfg.output_dir = scratch("steady").string();
  ASSERT_EQ(app::cmd_run(cfg), 0);
  const fs::path dir(cfg.output_dir);
  const auto first = app::read_snapshot(dir / "snapshots" / "step_000000.fctf");
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(dir / "snapshots")) {
    EXPECT_EQ(app::read_snapshot(entry.path()).u, first.u) << entry.path().filename();
    ++count;
  }
  EXPECT_EQ(count, 11u);

  const auto rows = parse_csv(slurp(dir / "diagnostics.csv"));
  ASSERT_EQ(rows.size(), 12u);
  std::size_t col = 0;
  while (rows[0][col] != "energy") ++col;
  for (std::size_t r = 2; r < rows.size(); ++r) EXPECT_EQ(rows[r][col], rows[1][col]);
}

TEST(CliRun, NonPositiveFloorExitsNamingH2) {
  const fs::path dir = scratch("bad_floor");
  std::ofstream(dir / "bad.conf") << "domain.dim = 1\ndomain.cells = 16\ndata.preset = generic_1d\n"
                                     "data.c0 = -1\ntime.T = 0.0001\ntime.j = 2\n";
  const Exec r = run_tool("run --config " + (dir / "bad.conf").string() + " --out " + (dir / "out").string());
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("H2"), std::string::npos) << r.output;
}

TEST(CliRun, UnknownKeyIsRejected) {
  const fs::path dir = scratch("unknown_key");
  std::ofstream(dir / "typo.conf") << "domain.dim = 1\ntime.jj = 4\n";
  const Exec r = run_tool("run --config " + (dir / "typo.conf").string());
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("time.jj"), std::string::npos) << r.output;
}

TEST(Snapshot, RoundTripsBitExactly) {
  auto cfg = config("generic_1d");
  cfg.j = 2;
  cfg.stepper.tau = cfg.T / 2;
  const auto out = app::execute_run(cfg);
  const auto snap = app::make_snapshot(out.trajectory.grid(), out.trajectory.tau, out.trajectory.states.back());
  const fs::path p = scratch("snapshot") / "s.fctf";
  app::write_snapshot(p, snap);
  EXPECT_EQ(app::read_snapshot(p), snap);
  EXPECT_EQ(slurp(p).substr(0, 4), "FCTF");

  auto bytes = app::encode_snapshot(snap);
  bytes[0] = 'X';
  EXPECT_THROW(app::decode_snapshot(bytes), facetflow::ValidationError);
  bytes = app::encode_snapshot(snap);
  bytes.resize(bytes.size() - 3);
  EXPECT_THROW(app::decode_snapshot(bytes), facetflow::ValidationError);
}

TEST(CliSweep, ResultDoesNotDependOnWorkers) {
  auto cfg = config("sweep_j_generic");
  cfg.sweep_values = {4, 8, 16};
  EXPECT_EQ(app::execute_sweep(cfg, 1).str(), app::execute_sweep(cfg, 3).str());
}

TEST(CliSweep, SteadyCaseHasZeroDifferences) {
  const auto rows = parse_csv(app::execute_sweep(config("sweep_j_steady"), 2).str());
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t r = 1; r + 1 < rows.size(); ++r) EXPECT_LE(std::stod(rows[r][6]), 1e-10);
}

TEST(CliSweep, GenericDifferencesHalveWithTau) {
  const auto rows = parse_csv(app::execute_sweep(config("sweep_j_generic"), 1).str());
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t r = 2; r + 1 < rows.size(); ++r) {
    const double ratio = std::stod(rows[r][7]);
    EXPECT_GT(ratio, 1.7) << "row " << r;
    EXPECT_LT(ratio, 2.3) << "row " << r;
  }
}

TEST(CliSweep, ManufacturedEllipticRatioIsFour) {
  const auto rows = parse_csv(app::execute_sweep(config("sweep_mms"), 2).str());
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t r = 2; r < rows.size(); ++r) EXPECT_NEAR(std::stod(rows[r][3]), 4.0, 0.2) << "row " << r;
}

TEST(CliCompare, SteadyErrorsAreNegligible) {
  const auto cfg = config("steady_unit");
  for (const auto& row : app::execute_compare(cfg, cfg)) {
    EXPECT_LE(row.cross_error, 10 * cfg.stepper.fp_tol);
    EXPECT_LE(row.identity_error, 10 * cfg.stepper.fp_tol);
  }
}

TEST(CliCompare, RefinementShrinksCrossError) {
  auto coarse = config("generic_1d");
  coarse.cells = {16};
  coarse.j = coarse.rho_steps = 8;
  coarse.stepper.tau = coarse.T / 8;
  auto fine = coarse;
  fine.cells = {32};
  fine.j = fine.rho_steps = 16;
  fine.stepper.tau = fine.T / 16;
  const double e_coarse = app::execute_compare(coarse, coarse).back().cross_error;
  const double e_fine = app::execute_compare(fine, fine).back().cross_error;
  EXPECT_LT(e_fine, e_coarse);
}

TEST(CliCompare, MismatchedGridsExitNonzero) {
  const fs::path dir = scratch("mismatch");
  std::ofstream(dir / "rho.conf") << slurp(fs::path(FACETFLOW_CONFIG_DIR) / "generic_1d.conf")
                                  << "\ndomain.cells = 16\n";
  const Exec r = run_tool("compare --config " + std::string(FACETFLOW_CONFIG_DIR) + "/generic_1d.conf --rho-config " +
                          (dir / "rho.conf").string() + " --out " + (dir / "out").string());
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("grid"), std::string::npos) << r.output;
}

TEST(CliVerify, SeedChangesSamplesNotVerdicts) {
  auto cfg = config("generic_1d");
  cfg.j = 8;
  cfg.stepper.tau = cfg.T / 8;
  cfg.verify_samples = 5000;
  cfg.seed = 1;
  const auto a = app::execute_verify(cfg);
  cfg.seed = 2;
  const auto b = app::execute_verify(cfg);
  ASSERT_EQ(a.size(), b.size());
  bool samples_differ = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].name, b[i].name);
    EXPECT_EQ(a[i].pass, b[i].pass) << a[i].name;
    EXPECT_TRUE(a[i].pass) << a[i].name;
    if (a[i].name.rfind("inequality_", 0) == 0) samples_differ = samples_differ || a[i].detail != b[i].detail;
  }
  EXPECT_TRUE(samples_differ);
}

TEST(CliVerify, LooseToleranceKeepsBoxAndDegradesResidualMargin) {
  auto cfg = config("generic_1d");
  cfg.j = 8;
  cfg.stepper.tau = cfg.T / 8;
  cfg.verify_samples = 1000;
  const auto tight = app::execute_verify(cfg);
  cfg.stepper.fp_tol = 1e-2;
  const auto loose = app::execute_verify(cfg);
  EXPECT_TRUE(find_check(loose, "box_bound").pass);
  EXPECT_TRUE(find_check(loose, "identity_inverse_laplacian").pass);
  const auto& rt = find_check(tight, "step_residual");
  const auto& rl = find_check(loose, "step_residual");
  EXPECT_TRUE(rl.pass);
  EXPECT_GT(rl.value, 1e4 * rt.value);
}

TEST(CliVerify, ExitCodeAndReports) {
  const fs::path dir = scratch("verify");
  std::ofstream(dir / "v.conf") << slurp(fs::path(FACETFLOW_CONFIG_DIR) / "generic_1d.conf")
                                << "\ntime.j = 8\nverify.samples = 1000\n";
  const Exec r = run_tool("verify --config " + (dir / "v.conf").string() + " --out " + (dir / "out").string());
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_TRUE(fs::exists(dir / "out" / "verify.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "verify.json"));
}

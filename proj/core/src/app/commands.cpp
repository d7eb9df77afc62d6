#include "facetflow/app/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "facetflow/app/presets.hpp"
#include "facetflow/app/snapshot.hpp"
#include "facetflow/elliptic.hpp"
#include "facetflow/error.hpp"
#include "facetflow/inequalities.hpp"

#ifndef FACETFLOW_VERSION
#define FACETFLOW_VERSION "unknown"
#endif

namespace facetflow::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

ordered_json config_json(const RunConfig& cfg) {
  ordered_json j = ordered_json::object();
  const ConfigMap effective = cfg.effective();
  for (const auto& [k, v] : effective.entries()) j[k] = v;
  return j;
}

ordered_json manifest_head(const std::string& command, const RunConfig& cfg) {
  ordered_json m;
  m["tool"] = "facetflow";
  m["version"] = FACETFLOW_VERSION;
  m["command"] = command;
  m["config"] = config_json(cfg);
  return m;
}

void write_json(const fs::path& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void run_pool(std::size_t tasks, std::size_t workers, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(workers, tasks));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < n; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Value of `traj` at node (i, j) of the coarser grid `coarse` and time t.
class Sampler {
 public:
  Sampler(const Trajectory& traj, const Grid& coarse) : traj_(traj) {
    const Grid& g = traj.grid();
    for (int a = 0; a < g.dim(); ++a) {
      if (g.cells(a) % coarse.cells(a) != 0 || g.length(a) != coarse.length(a)) {
        throw ValidationError("sweep grids are not nested refinements of each other");
      }
      ratio_[a] = g.cells(a) / coarse.cells(a);
    }
  }

  const ScalarField& u_at(double t) {
    const double r = t / traj_.tau;
    const double k = std::round(r);
    if (std::abs(r - k) < 1e-9) return traj_.states[static_cast<std::size_t>(k)].u;
    cache_ = eval_interpolants(traj_, t).u_tilde;
    return *cache_;
  }

  std::size_t node(const Grid& coarse, std::size_t coarse_node) const {
    const auto [i, j] = coarse.ij(coarse_node);
    return traj_.grid().index(i * ratio_[0], j * ratio_[1]);
  }

 private:
  const Trajectory& traj_;
  std::array<int, 2> ratio_{1, 1};
  std::optional<ScalarField> cache_;
};

// max over the coarse run's time levels and nodes of |u_a - u_b|.
double trajectory_distance(const Trajectory& a, const Trajectory& b) {
  const Trajectory& time_coarse = a.tau >= b.tau ? a : b;
  const Trajectory& space_coarse = a.grid().node_count() <= b.grid().node_count() ? a : b;
  const Grid& grid = space_coarse.grid();
  Sampler sa(a, grid), sb(b, grid);
  double d = 0.0;
  for (std::size_t k = 0; k < time_coarse.states.size(); ++k) {
    const double t = time_coarse.time(k);
    const ScalarField ua = sa.u_at(t);
    const ScalarField& ub = sb.u_at(t);
    for (std::size_t n = 0; n < grid.node_count(); ++n) {
      d = std::max(d, std::abs(ua[sa.node(grid, n)] - ub[sb.node(grid, n)]));
    }
  }
  return d;
}

double mms_error(const RunConfig& cfg) {
  const GridPtr grid = make_grid(cfg);
  const double pi = std::numbers::pi;
  const double kx = pi / grid->length(0);
  const double ky = grid->dim() == 2 ? pi / grid->length(1) : 0.0;
  auto exact = [&](double x, double y) {
    return grid->dim() == 2 ? std::sin(kx * x) * std::sin(ky * y) : std::sin(kx * x);
  };
  const ScalarField u_star = ScalarField::from_function(grid, exact);
  std::vector<double> rhs(grid->node_count());
  for (std::size_t n = 0; n < rhs.size(); ++n) rhs[n] = (kx * kx + ky * ky + 1.0) * u_star[n];
  const auto op = EllipticOperator::from_nodal(ScalarField::constant(grid, 1.0), 1.0);
  const auto sol = solve_dirichlet(op, ScalarField(grid, rhs), ScalarField::constant(grid, 0.0),
                                   cfg.stepper.linear);
  double err = 0.0;
  for (std::size_t n = 0; n < rhs.size(); ++n) err = std::max(err, std::abs(sol.u[n] - u_star[n]));
  return err;
}

}  // namespace

// ---------------------------------------------------------------------------

RunOutputs execute_run(const RunConfig& cfg) {
  const ProblemData data = make_problem(cfg);
  spdlog::info("run: preset {} on {} nodes, T = {}, j = {}", cfg.preset, data.grid().node_count(), cfg.T, cfg.j);
  RunOutputs out{run_rothe(data, cfg.T, cfg.j, cfg.stepper), {}, {}, {}, {}};
  out.report = apriori_report(out.trajectory);
  for (const auto& name : cfg.test_functions) {
    const TestFunction xi = test_function_by_name(name, out.trajectory.grid());
    const WeakMode mode = xi.nonnegative ? WeakMode::inequality : WeakMode::equality;
    out.test_function_names.push_back(name);
    out.weak_modes.push_back(mode);
    out.weak.push_back(weak_residual(out.trajectory, xi, mode));
  }
  return out;
}

int cmd_run(const RunConfig& cfg) {
  const RunOutputs out = execute_run(cfg);
  const Trajectory& traj = out.trajectory;
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  CsvTable diag(DiagnosticsReport::column_names());
  for (std::size_t k = 0; k < out.report.size(); ++k) diag.add_row(out.report.row(k));
  diag.write(dir / "diagnostics.csv");

  CsvTable weak({"test_function", "mode", "value", "tol_slack", "scale", "term_time", "term_laplace_sq",
                 "term_gradient", "term_curvature"});
  for (std::size_t i = 0; i < out.weak.size(); ++i) {
    const WeakResidual& w = out.weak[i];
    const bool ineq = out.weak_modes[i] == WeakMode::inequality;
    weak.add_row({out.test_function_names[i], std::string(ineq ? "inequality" : "equality"), w.value,
                  w.tol_slack, w.scale, w.terms[0], w.terms[1], w.terms[2], w.terms[3]});
  }
  weak.write(dir / "weak_residual.csv");

  if (cfg.snapshot_stride > 0) {
    fs::create_directories(dir / "snapshots");
    for (const StepState& s : traj.states) {
      if (s.k % cfg.snapshot_stride != 0 && s.k != traj.steps()) continue;
      char name[32];
      std::snprintf(name, sizeof name, "step_%06zu.fctf", s.k);
      write_snapshot(dir / "snapshots" / name, make_snapshot(traj.grid(), traj.tau, s));
    }
  }

  ordered_json m = manifest_head("run", cfg);
  double max_res = 0.0;
  std::size_t iters = 0;
  int stages = 1;
  for (const StepState& s : traj.states) {
    max_res = std::max(max_res, s.residual);
    iters += s.iters;
    stages = std::max(stages, s.stages_used);
  }
  m["summary"] = {{"steps", traj.steps()},
                  {"tau", traj.tau},
                  {"final_time", traj.final_time()},
                  {"max_residual", max_res},
                  {"total_iterations", iters},
                  {"max_stages", stages},
                  {"min_rho", *std::min_element(out.report.min_rho.begin(), out.report.min_rho.end())}};
  m["outputs"] = {"diagnostics.csv", "weak_residual.csv", "snapshots/"};
  write_json(dir / "manifest.json", m);
  spdlog::info("run: wrote {}", dir.string());
  return 0;
}

// ---------------------------------------------------------------------------

std::vector<rho::CrossValidationRow> execute_compare(const RunConfig& u_cfg, const RunConfig& rho_cfg) {
  if (u_cfg.dim != 1 || rho_cfg.dim != 1) throw ValidationError("compare needs 1D configs");
  if (u_cfg.T != rho_cfg.T) throw ValidationError("compare: the two configs have different final times");
  const ProblemData u_data = make_problem(u_cfg);
  const ProblemData rho_data = make_problem(rho_cfg);
  if (!(u_data.grid() == rho_data.grid())) {
    throw ValidationError("compare: height and slope configs use different grids");
  }
  const Trajectory traj = run_rothe(u_data, u_cfg.T, u_cfg.j, u_cfg.stepper);
  const auto [rho0, rho_b] = rho::slope_data_from(rho_data);
  const std::size_t steps = rho_cfg.rho_steps > 0 ? rho_cfg.rho_steps : rho_cfg.j;
  const rho::RhoTrajectory slope = rho::solve_rho_1d(rho0, rho_b, rho_cfg.T, steps);
  std::vector<double> times;
  for (std::size_t k = 0; k <= traj.steps(); ++k) times.push_back(traj.time(k));
  return rho::cross_validate(traj, slope, times, u_cfg.stepper.fp_tol);
}

int cmd_compare(const RunConfig& u_cfg, const RunConfig& rho_cfg) {
  const auto rows = execute_compare(u_cfg, rho_cfg);
  const fs::path dir(u_cfg.output_dir);
  fs::create_directories(dir);
  CsvTable table({"t", "cross_error", "identity_error", "identity_bound"});
  bool ok = true;
  for (const auto& r : rows) {
    table.add_row(std::vector<double>{r.t, r.cross_error, r.identity_error, r.identity_bound});
    if (r.identity_error > r.identity_bound) ok = false;
  }
  table.write(dir / "compare.csv");
  if (!ok) spdlog::error("compare: identity 1/Laplace_h(u) = rho exceeded its bound");
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

std::vector<CheckResult> execute_verify(const RunConfig& cfg) {
  std::vector<CheckResult> checks;
  auto add = [&](std::string name, double value, double bound, bool pass, std::string detail = {}) {
    checks.push_back({std::move(name), value, bound, pass, std::move(detail)});
  };

  for (const InequalitySuiteRow& row : inequality_property_suite(cfg.seed, cfg.verify_samples)) {
    add("inequality_" + to_string(row.which), static_cast<double>(row.failures), 0.0, row.failures == 0,
        std::to_string(row.samples) + " samples, worst margin " + format_number(row.worst_margin));
  }

  const RunOutputs out = execute_run(cfg);
  const Trajectory& traj = out.trajectory;
  const DiagnosticsReport& r = out.report;
  const double fp_tol = cfg.stepper.fp_tol;
  const Grid& grid = traj.grid();

  double max_res = 0.0;
  for (const StepState& s : traj.states) max_res = std::max(max_res, s.residual);
  add("step_residual", max_res, fp_tol, max_res <= fp_tol, "margin " + format_number(fp_tol - max_res));

  double identity = 0.0, rmax = 0.0;
  for (const StepState& s : traj.states) {
    const ScalarField lap = apply_laplacian(s.u);
    for (auto node : grid.interior_nodes()) identity = std::max(identity, std::abs(1.0 / lap[node] - s.rho[node]));
    rmax = std::max(rmax, s.rho.max_abs());
  }
  const double id_bound = fp_tol * rmax * rmax / (1.0 - std::min(0.5, fp_tol * rmax));
  add("identity_inverse_laplacian", identity, id_bound, identity <= id_bound,
      "margin " + format_number(id_bound - identity));

  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < r.size(); ++k) margin = std::min(margin, r.box_margin[k]);
  if (r.size() < 2) margin = 0.0;
  add("box_bound", margin, -fp_tol, margin >= -fp_tol);

  const double min_lap = *std::min_element(r.min_laplacian_u.begin(), r.min_laplacian_u.end());
  add("positivity_laplacian", min_lap, 0.0, min_lap > 0.0);

  double over = -std::numeric_limits<double>::infinity();
  for (double v : r.max_u_over_b0) over = std::max(over, v);
  const double sub_tol = 1e-10 * (1.0 + traj.data.b0().max_abs());
  add("subharmonic_bound", over, sub_tol, over <= sub_tol);

  bool monotone = true;
  for (auto* series : {&r.cum_laplace_rho3_sq, &r.cum_weighted_flux, &r.cum_grad_rho_sq,
                       &r.cum_negative_psi, &r.cum_drho_dt_sq}) {
    for (std::size_t k = 1; k < series->size(); ++k) monotone = monotone && (*series)[k] >= (*series)[k - 1];
  }
  add("cumulative_monotone", monotone ? 0.0 : 1.0, 0.0, monotone);

  const GapReport gaps = interpolant_gap_report(traj);
  double u_gap_defect = 0.0;
  for (const auto& g : gaps.intervals) u_gap_defect = std::max(u_gap_defect, g.u_gap_identity_defect);
  add("interpolant_u_gap", u_gap_defect, 0.0, gaps.u_gap_holds(), "exact identity, 1e-12 relative");
  add("interpolant_rho_gap", gaps.rho_gap_identity_defect, 0.0, gaps.rho_gap_holds(), "exact identity, 1e-12 relative");

  for (std::size_t i = 0; i < out.weak.size(); ++i) {
    const WeakResidual& w = out.weak[i];
    if (out.weak_modes[i] == WeakMode::inequality) {
      add("weak_inequality_" + out.test_function_names[i], w.value, w.tol_slack, w.value <= w.tol_slack);
    } else {
      add("weak_equality_defect_" + out.test_function_names[i], w.value, 0.0, true, "measured, not asserted");
    }
  }

  if (grid.dim() == 1 && traj.steps() > 0) {
    const double modulus = holder_modulus(cubic_interpolant_samples(traj));
    const double ref = holder_reference_norm(traj);
    add("holder_modulus", modulus, kHolderConstant * ref, modulus <= kHolderConstant * ref);
    add("cubic_interpolant_gap", gaps.cubic_gap, gaps.cubic_bound, gaps.cubic_gap <= gaps.cubic_bound);
  }
  return checks;
}

int cmd_verify(const RunConfig& cfg) {
  const auto checks = execute_verify(cfg);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  CsvTable table({"check", "value", "bound", "pass", "detail"});
  ordered_json j = manifest_head("verify", cfg);
  j["checks"] = ordered_json::array();
  bool ok = true;
  for (const auto& c : checks) {
    table.add_row({c.name, c.value, c.bound, std::string(c.pass ? "pass" : "fail"), c.detail});
    j["checks"].push_back({{"check", c.name}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass},
                           {"detail", c.detail}});
    ok = ok && c.pass;
    if (!c.pass) spdlog::error("verify: {} failed (value {}, bound {})", c.name, c.value, c.bound);
  }
  j["all_pass"] = ok;
  table.write(dir / "verify.csv");
  write_json(dir / "verify.json", j);
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

CsvTable execute_sweep(const RunConfig& cfg, std::size_t workers) {
  if (cfg.sweep_values.empty()) throw ValidationError("sweep needs sweep.values");
  std::vector<double> values = cfg.sweep_values;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  std::vector<RunConfig> runs(values.size(), cfg);
  for (std::size_t i = 0; i < values.size(); ++i) {
    RunConfig& c = runs[i];
    const double v = values[i];
    if (cfg.sweep_axis == "j") {
      if (!(v >= 1.0) || v != std::floor(v)) throw ValidationError("sweep over j needs positive integers");
      c.j = static_cast<std::size_t>(v);
    } else if (cfg.sweep_axis == "cells") {
      if (!(v >= 2.0) || v != std::floor(v)) throw ValidationError("sweep over cells needs integers >= 2");
      std::fill(c.cells.begin(), c.cells.end(), static_cast<int>(v));
    } else {
      if (!(v > 0.0)) throw ValidationError("sweep over tau needs positive values");
      c.j = static_cast<std::size_t>(std::max(1.0, std::round(cfg.T / v)));
    }
    c.stepper.tau = c.T / static_cast<double>(c.j);
  }

  if (cfg.sweep_target == "elliptic_mms") {
    if (cfg.sweep_axis != "cells") throw ValidationError("elliptic_mms sweeps need sweep.axis = cells");
    std::vector<double> errors(values.size());
    run_pool(values.size(), workers, [&](std::size_t i) { errors[i] = mms_error(runs[i]); });
    CsvTable table({"value", "cells", "error", "ratio"});
    for (std::size_t i = 0; i < values.size(); ++i) {
      CsvCell ratio = std::string();
      if (i > 0 && errors[i] > 0.0) ratio = errors[i - 1] / errors[i];
      table.add_row({values[i], static_cast<long long>(runs[i].cells[0]), errors[i], ratio});
    }
    return table;
  }

  std::vector<std::optional<Trajectory>> trajs(values.size());
  run_pool(values.size(), workers, [&](std::size_t i) {
    spdlog::info("sweep: {} = {}", cfg.sweep_axis, values[i]);
    trajs[i] = run_rothe(make_problem(runs[i]), runs[i].T, runs[i].j, runs[i].stepper);
  });
  std::vector<double> diffs(values.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i + 1 < values.size(); ++i) diffs[i] = trajectory_distance(*trajs[i], *trajs[i + 1]);

  CsvTable table({"value", "j", "cells", "tau", "max_residual", "min_rho", "successive_diff", "ratio"});
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Trajectory& t = *trajs[i];
    double max_res = 0.0, min_rho = std::numeric_limits<double>::infinity();
    for (const StepState& s : t.states) {
      max_res = std::max(max_res, s.residual);
      min_rho = std::min(min_rho, s.rho.min());
    }
    CsvCell diff = std::string(), ratio = std::string();
    if (i + 1 < values.size()) diff = diffs[i];
    if (i > 0 && i + 1 < values.size() && diffs[i] > 0.0) ratio = diffs[i - 1] / diffs[i];
    table.add_row({values[i], static_cast<long long>(runs[i].j), static_cast<long long>(runs[i].cells[0]),
                   t.tau, max_res, min_rho, diff, ratio});
  }
  return table;
}

int cmd_sweep(const RunConfig& cfg, std::size_t workers) {
  const CsvTable table = execute_sweep(cfg, workers);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  table.write(dir / "sweep.csv");
  ordered_json m = manifest_head("sweep", cfg);
  m["outputs"] = {"sweep.csv"};
  write_json(dir / "manifest.json", m);
  return 0;
}

}  // namespace facetflow::app

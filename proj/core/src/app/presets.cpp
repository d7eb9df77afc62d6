#include "facetflow/app/presets.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "facetflow/elliptic.hpp"
#include "facetflow/error.hpp"

namespace facetflow::app {

namespace {

double param(const RunConfig& cfg, const std::string& name, double fallback) {
  auto it = cfg.preset_params.find(name);
  return it == cfg.preset_params.end() ? fallback : it->second;
}

ScalarField slope_from_cube(const GridPtr& grid, const std::function<double(double, double)>& w,
                            const std::string& preset) {
  return ScalarField::from_function(grid, [&](double x, double y) {
    const double v = w(x, y);
    if (!(v > 0.0)) {
      throw ValidationError("preset " + preset + " gives a nonpositive slope cube; adjust its parameters");
    }
    return std::cbrt(v);
  });
}

ProblemData from_file(const RunConfig& cfg, const GridPtr& grid) {
  if (cfg.data_file.empty()) throw ValidationError("data.preset = file needs data.file");
  std::ifstream in(cfg.data_file);
  if (!in) throw ValidationError("cannot open data file " + cfg.data_file);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("data file " + cfg.data_file + ": " + e.what());
  }
  auto field = [&](const char* name) {
    if (!doc.contains(name) || !doc[name].is_array()) {
      throw ValidationError(std::string("data file needs an array '") + name + "'");
    }
    std::vector<double> v = doc[name].get<std::vector<double>>();
    if (v.size() != grid->node_count()) {
      throw ValidationError(std::string("data file array '") + name + "' has " + std::to_string(v.size()) +
                            " entries, grid has " + std::to_string(grid->node_count()) + " nodes");
    }
    return ScalarField(grid, std::move(v));
  };
  if (!doc.contains("c0") || !doc["c0"].is_number()) throw ValidationError("data file needs a number 'c0'");
  return ProblemData(field("b0"), field("b1"), doc["c0"].get<double>(), field("u0"));
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"steady_unit", "generic_1d", "akw_1d", "bump_2d", "file"};
  return names;
}

GridPtr make_grid(const RunConfig& cfg) { return build_grid(cfg.dim, cfg.lengths, cfg.cells); }

ProblemData problem_from_slope(const ScalarField& rho_target, double b0, double c0) {
  const GridPtr& grid = rho_target.grid_ptr();
  std::vector<double> rhs(grid->node_count(), 0.0);
  for (auto node : grid->interior_nodes()) rhs[node] = -1.0 / rho_target[node];
  LinearSolveConfig linear;
  linear.cg_rel_tol = 1e-14;
  const ScalarField boundary = ScalarField::constant(grid, b0);
  ScalarField u0 = solve_poisson(ScalarField(grid, std::move(rhs)), boundary, linear).u;
  ScalarField b1 = laplacian_with_boundary_extension(u0);
  if (!(c0 > 0.0)) c0 = 0.5 * b1.min();
  return ProblemData(boundary, std::move(b1), c0, std::move(u0));
}

ProblemData make_problem(const RunConfig& cfg) {
  const GridPtr grid = make_grid(cfg);
  const double c0 = param(cfg, "c0", -1.0);
  const double b0 = param(cfg, "b0", 0.0);
  const double Lx = grid->length(0);
  const double Ly = grid->dim() == 2 ? grid->length(1) : 1.0;
  const double pi = std::numbers::pi;
  const bool given_c0 = cfg.preset_params.count("c0") != 0;

  if (cfg.preset == "steady_unit") {
    const bool two = grid->dim() == 2;
    auto u = ScalarField::from_function(grid, [two](double x, double y) {
      return two ? 0.25 * (x * x + y * y) : 0.5 * x * x;
    });
    return ProblemData(u, ScalarField::constant(grid, 1.0), given_c0 ? c0 : 1.0, u);
  }
  if (cfg.preset == "file") return from_file(cfg, grid);

  if (given_c0 && !(c0 > 0.0)) {
    throw ValidationError("H2 violated: floor c0 must be positive (data.c0 = " + std::to_string(c0) + ")");
  }
  if (cfg.preset == "generic_1d") {
    if (grid->dim() != 1) throw ValidationError("preset generic_1d needs domain.dim = 1");
    const double w0 = param(cfg, "w0", 1.0);
    const double slope = param(cfg, "slope", 0.5);
    const double amp = param(cfg, "amplitude", 0.3);
    auto rho = slope_from_cube(grid, [=](double x, double) {
      return w0 + slope * x / Lx + amp * std::sin(2.0 * pi * x / Lx);
    }, cfg.preset);
    return problem_from_slope(rho, b0, c0);
  }
  if (cfg.preset == "akw_1d") {
    if (grid->dim() != 1) throw ValidationError("preset akw_1d needs domain.dim = 1");
    const double edge = param(cfg, "rho_edge", 0.5);
    const double peak = param(cfg, "rho_peak", 1.0);
    const double e3 = edge * edge * edge, p3 = peak * peak * peak;
    auto rho = slope_from_cube(grid, [=](double x, double) {
      return e3 + (p3 - e3) * std::sin(pi * x / Lx);
    }, cfg.preset);
    return problem_from_slope(rho, b0, c0);
  }
  if (cfg.preset == "bump_2d") {
    if (grid->dim() != 2) throw ValidationError("preset bump_2d needs domain.dim = 2");
    const double w0 = param(cfg, "w0", 1.0);
    const double amp = param(cfg, "amplitude", 0.5);
    auto rho = slope_from_cube(grid, [=](double x, double y) {
      return w0 + amp * std::sin(pi * x / Lx) * std::sin(pi * y / Ly);
    }, cfg.preset);
    return problem_from_slope(rho, b0, c0);
  }
  throw ValidationError("unknown data.preset '" + cfg.preset + "'");
}

}  // namespace facetflow::app

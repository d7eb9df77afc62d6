#pragma once

#include <map>
#include <string>
#include <vector>

#include "facetflow/app/config.hpp"
#include "facetflow/grid.hpp"
#include "facetflow/problem.hpp"

namespace facetflow::app {

/// Names accepted by data.preset.
const std::vector<std::string>& preset_names();

/// Builds and validates the problem data described by a config:
///   steady_unit  u0 = x^2/2 (1D) or (x^2+y^2)/4 (2D), b0 = u0, b1 = 1;
///                c0 defaults to 1.
///   generic_1d   rho*^3 = w0 + slope x/L + amplitude sin(2 pi x/L);
///   akw_1d       rho*^3 = rho_edge^3 + (rho_peak^3 - rho_edge^3) sin(pi x/L);
///   bump_2d      rho*^3 = w0 + amplitude sin(pi x/Lx) sin(pi y/Ly);
///   file         arrays b0, b1, u0 and scalar c0 from a JSON file.
/// For the rho* presets u0 solves Laplace_h u0 = 1/rho* with u0 = b0 (data.b0,
/// default 0) on the boundary, b1 is Laplace_h u0 extended to the boundary,
/// and c0 defaults to half the minimum of b1.
ProblemData make_problem(const RunConfig& cfg);

GridPtr make_grid(const RunConfig& cfg);

/// Problem with Laplace_h u0 = 1/rho* for a target slope given at the nodes.
ProblemData problem_from_slope(const ScalarField& rho_target, double b0, double c0 = -1.0);

}  // namespace facetflow::app

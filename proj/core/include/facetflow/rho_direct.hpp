#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "facetflow/grid.hpp"
#include "facetflow/stepper.hpp"

namespace facetflow::rho {

/// Slope trajectory of rho_t + rho^2 (rho^3)_xxxx = 0 on a 1D grid with
/// rho = rho_b and (rho^3)_xx = 0 at both ends.
struct RhoTrajectory {
  GridPtr grid;
  double dt = 0.0;
  std::pair<double, double> boundary{1.0, 1.0};
  std::vector<ScalarField> states;
  /// Per step: |rho_{n+1} - rho_n + dt rho_{n+1}^2 D4 rho_{n+1}^3|_inf, the
  /// defect of the lagged linearisation against backward Euler.
  std::vector<double> defects;

  double time(std::size_t n) const noexcept { return dt * static_cast<double>(n); }
  double final_time() const noexcept {
    return states.empty() ? 0.0 : dt * static_cast<double>(states.size() - 1);
  }
  /// Linear interpolation in time between stored levels.
  ScalarField at(double t) const;
};

/// Discrete (rho^3)_xxxx at interior nodes, with ghost values from
/// (rho^3)_xx = 0 at each end: w_{-1} = 2 w_0 - w_1. Boundary entries are 0.
std::vector<double> fourth_difference_of_cube(const Grid& grid, std::span<const double> rho);

/// One lagged-linearisation step without positivity checks:
///   (rho' - rho)/dt + rho^2 D4 (3 rho^2 rho' - 2 rho^3) = 0,
/// solved for the increment rho' - rho by banded elimination. Boundary
/// entries of the result equal rho_b.
std::vector<double> rho_step(const Grid& grid, std::span<const double> rho,
                             std::pair<double, double> rho_b, double dt);

/// Backward-Euler defect of a computed step.
double nonlinear_defect(const Grid& grid, std::span<const double> rho_old,
                        std::span<const double> rho_new, double dt);

/// Marches n_steps steps of size T/n_steps from rho0. Throws PositivityError
/// at the first time level with a nonpositive value and ValidationError for a
/// non-1D grid, fewer than 5 nodes or nonpositive data.
RhoTrajectory solve_rho_1d(const ScalarField& rho0, std::pair<double, double> rho_b, double T,
                           std::size_t n_steps);

struct CrossValidationRow {
  double t = 0.0;
  /// |rho_bar(from u) - rho_direct|_inf over all nodes.
  double cross_error = 0.0;
  /// |1/Laplace_h(u_bar) - rho_bar|_inf over interior nodes.
  double identity_error = 0.0;
  /// fp_tol * max(rho_bar)^2, the bound identity_error must respect.
  double identity_bound = 0.0;
};

/// Compares the height-based slope with the direct slope solver at the
/// requested times. Throws ValidationError when the grids differ.
std::vector<CrossValidationRow> cross_validate(const Trajectory& traj, const RhoTrajectory& rho,
                                               std::span<const double> times, double fp_tol);

/// rho0 = 1/Laplace_h(u0) inside and 1/b1 on the boundary, rho_b = 1/b1 at
/// the two ends: the slope data matching a 1D height problem.
std::pair<ScalarField, std::pair<double, double>> slope_data_from(const ProblemData& data);

}  // namespace facetflow::rho

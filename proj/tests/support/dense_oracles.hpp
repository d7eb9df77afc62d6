#pragma once

// Reference solvers for small instances. They assemble everything densely
// from the textbook stencils and share no code with the library solvers.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "facetflow/grid.hpp"
#include "facetflow/problem.hpp"

namespace facetflow::testing {

/// -div(a grad u) + c u = rhs with u = g on the boundary, arithmetic-mean edge
/// coefficients, assembled densely and solved by partial-pivot LU.
std::vector<double> dense_dirichlet_solve(const Grid& grid, const std::vector<double>& a, double c,
                                          const std::vector<double>& rhs, const std::vector<double>& g);

struct NewtonResult {
  std::vector<double> u;
  std::vector<double> psi;
  double residual = 0.0;
  int iterations = 0;
};

/// Damped Newton on the full coupled 1D step system
///   (u - u_prev)/tau - D2 exp(3 psi) + tau psi = 0,  D2 u - exp(-psi) = 0
/// with u = b0 and psi = -ln b1 at both ends and an analytic Jacobian.
NewtonResult dense_newton_step(const Grid& grid, const std::vector<double>& u_prev,
                               const ProblemData& data, double tau);

/// Damped Newton on backward Euler for rho_t + rho^2 D4(rho^3) = 0 with the
/// reflected ghost w_{-1} = 2 w_0 - w_1 at each end.
std::vector<double> dense_newton_rho_step(const Grid& grid, const std::vector<double>& rho,
                                          double dt);

/// The fourth difference with ghosts, written out node by node.
std::vector<double> reference_d4(const Grid& grid, const std::vector<double>& w);

/// Pairwise supremum in long double.
double brute_force_holder(const std::vector<double>& x, const std::vector<double>& t,
                          const std::vector<double>& f, double ax, double at);

/// 1D height data with interior Laplacian `lap`, built by a dense solve.
std::vector<double> dense_height_from_laplacian(const Grid& grid, const std::vector<double>& lap,
                                                double left, double right);

/// The 8-cell step problem on (0,1): b1 = 1 + x/2, b0 = (0, 0.3), u0 with
/// Laplacian 1 + x/2, and a random u_prev whose Laplacian is
/// (1 + x/2) exp(0.3 z) with z standard normal.
struct StepDraw {
  GridPtr grid;
  ProblemData data;
  std::vector<double> u_prev;
  double tau = 0.01;
};
StepDraw random_step_draw(std::mt19937_64& rng, double tau = 0.01);

}  // namespace facetflow::testing

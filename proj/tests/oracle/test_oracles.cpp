// Library results against the dense reference solvers.

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dense_oracles.hpp"
#include "facetflow/diagnostics.hpp"
#include "facetflow/elliptic.hpp"
#include "facetflow/rho_direct.hpp"
#include "facetflow/stepper.hpp"

namespace ff = facetflow;
using ff::testing::dense_dirichlet_solve;

namespace {

double max_diff(const std::vector<double>& a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) d = std::max(d, std::abs(a[n] - b[n]));
  return d;
}

std::vector<double> uniform(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace

TEST(DenseOracle, PoissonRandomRhsEightCells) {
  std::mt19937_64 rng(11);
  auto grid = ff::build_grid_1d(1.0, 8);
  for (int draw = 0; draw < 5; ++draw) {
    const auto rhs = uniform(rng, grid->node_count(), -5.0, 5.0);
    const auto g = uniform(rng, grid->node_count(), -1.0, 1.0);
    const auto sol = ff::solve_poisson(ff::ScalarField(grid, rhs), ff::ScalarField(grid, g));
    const auto ref = dense_dirichlet_solve(*grid, std::vector<double>(grid->node_count(), 1.0), 0.0, rhs, g);
    EXPECT_LE(max_diff(ref, sol.u.values()), 1e-10);
  }
}

TEST(DenseOracle, VariableCoefficientOneD) {
  std::mt19937_64 rng(12);
  auto grid = ff::build_grid_1d(2.0, 13);
  const auto a = uniform(rng, grid->node_count(), 0.1, 10.0);
  const auto rhs = uniform(rng, grid->node_count(), -1.0, 1.0);
  const auto g = uniform(rng, grid->node_count(), -1.0, 1.0);
  const auto op = ff::EllipticOperator::from_nodal(ff::ScalarField(grid, a), 0.3);
  const auto sol = ff::solve_dirichlet(op, ff::ScalarField(grid, rhs), ff::ScalarField(grid, g));
  EXPECT_LE(max_diff(dense_dirichlet_solve(*grid, a, 0.3, rhs, g), sol.u.values()), 1e-10);
}

TEST(DenseOracle, VariableCoefficientTwoDConjugateGradient) {
  std::mt19937_64 rng(13);
  auto grid = ff::build_grid_2d(1.0, 1.5, 6, 5);
  const auto a = uniform(rng, grid->node_count(), 0.5, 3.0);
  const auto rhs = uniform(rng, grid->node_count(), -1.0, 1.0);
  const auto g = uniform(rng, grid->node_count(), -1.0, 1.0);
  const auto op = ff::EllipticOperator::from_nodal(ff::ScalarField(grid, a), 0.0);
  for (bool jacobi : {false, true}) {
    ff::LinearSolveConfig cfg;
    cfg.jacobi_preconditioner = jacobi;
    cfg.cg_rel_tol = 1e-14;
    const auto sol = ff::solve_dirichlet(op, ff::ScalarField(grid, rhs), ff::ScalarField(grid, g), cfg);
    EXPECT_LE(max_diff(dense_dirichlet_solve(*grid, a, 0.0, rhs, g), sol.u.values()), 1e-10);
  }
}

TEST(DenseOracle, StepSolverMatchesNewton) {
  std::mt19937_64 rng(2024);
  for (int draw = 0; draw < 20; ++draw) {
    auto d = ff::testing::random_step_draw(rng);
    const auto ref = ff::testing::dense_newton_step(*d.grid, d.u_prev, d.data, d.tau);
    ASSERT_LE(ref.residual, 1e-9) << "oracle did not converge, draw " << draw;
    ff::StepperConfig cfg;
    cfg.tau = d.tau;
    const auto state = ff::solve_step(ff::ScalarField(d.grid, d.u_prev), d.data, cfg);
    EXPECT_LE(max_diff(ref.psi, state.psi.values()), 1e-8) << "draw " << draw;
    EXPECT_LE(max_diff(ref.u, state.u.values()), 1e-8) << "draw " << draw;
  }
}

TEST(DenseOracle, RhoStepIsFirstOrderCloseToBackwardEuler) {
  auto grid = ff::build_grid_1d(1.0, 16);
  std::vector<double> rho(grid->node_count());
  for (std::size_t n = 0; n < rho.size(); ++n) {
    const double x = grid->coord(n)[0];
    // rho^3 has zero second derivative at both ends, like the scheme's ghosts.
    rho[n] = std::cbrt(1.0 + 0.1 * x + 0.2 * std::sin(M_PI * x));
  }
  const std::pair<double, double> rb{rho.front(), rho.back()};
  double prev_gap = 0.0;
  for (double dt : {4e-6, 2e-6, 1e-6}) {
    const auto lagged = ff::rho::rho_step(*grid, rho, rb, dt);
    const auto exact = ff::testing::dense_newton_rho_step(*grid, rho, dt);
    const double gap = max_diff(exact, lagged);
    if (prev_gap > 0.0) EXPECT_GT(prev_gap / gap, 3.0);  // O(dt^2) per step
    prev_gap = gap;
  }
}

TEST(DenseOracle, FourthDifferenceWithGhosts) {
  std::mt19937_64 rng(5);
  auto grid = ff::build_grid_1d(1.0, 10);
  const auto rho = uniform(rng, grid->node_count(), 0.5, 2.0);
  std::vector<double> w(rho.size());
  for (std::size_t n = 0; n < w.size(); ++n) w[n] = rho[n] * rho[n] * rho[n];
  const auto lib = ff::rho::fourth_difference_of_cube(*grid, rho);
  const auto ref = ff::testing::reference_d4(*grid, w);
  for (std::size_t n = 0; n < w.size(); ++n) EXPECT_NEAR(lib[n], ref[n], 1e-9 * (1.0 + std::abs(ref[n])));
}

TEST(DenseOracle, TrapezoidSumOfSquares) {
  auto grid = ff::build_grid_1d(1.0, 10);
  double brute = 0.0;
  for (int i = 0; i <= 10; ++i) {
    const double x = 0.1 * i;
    brute += (i == 0 || i == 10 ? 0.5 : 1.0) * x * x;
  }
  brute *= 0.1;
  const auto f = ff::ScalarField::from_function(grid, [](double x, double) { return x * x; });
  EXPECT_NEAR(ff::integrate(f), brute, 1e-15);
  EXPECT_NEAR(brute, 0.335, 1e-14);
}

TEST(DenseOracle, HolderModulusAgainstPairwiseScan) {
  ff::StepperConfig cfg;
  auto grid = ff::build_grid_1d(1.0, 8);
  std::mt19937_64 rng(3);
  auto d = ff::testing::random_step_draw(rng);
  const auto traj = ff::run_rothe(d.data, 0.004, 4, cfg);
  const auto samples = ff::cubic_interpolant_samples(traj, 2);
  std::vector<double> x, t, f;
  for (const auto& s : samples) {
    x.push_back(s.x);
    t.push_back(s.t);
    f.push_back(s.f);
  }
  const double lib = ff::holder_modulus(samples);
  const double ref = ff::testing::brute_force_holder(x, t, f, 0.5, 0.25);
  EXPECT_NEAR(lib, ref, 1e-12 * ref);
}

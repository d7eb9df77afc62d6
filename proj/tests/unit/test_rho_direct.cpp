#include <cmath>

#include <gtest/gtest.h>

#include "facetflow/error.hpp"
#include "facetflow/problem.hpp"
#include "facetflow/rho_direct.hpp"
#include "facetflow/stepper.hpp"

namespace ff = facetflow;
namespace rho = facetflow::rho;

namespace {

double drift(const ff::ScalarField& a, const ff::ScalarField& b) {
  double d = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) d = std::max(d, std::abs(a[n] - b[n]));
  return d;
}

ff::ScalarField bumpy(const ff::GridPtr& g) {
  return ff::ScalarField::from_function(g, [](double x, double) {
    return std::cbrt(1.0 + 0.2 * x + 0.3 * std::sin(M_PI * x));
  });
}

}  // namespace

TEST(RhoDirect, ConstantIsSteady) {
  auto g = ff::build_grid_1d(1.0, 20);
  const auto r0 = ff::ScalarField::constant(g, 1.7);
  const auto traj = rho::solve_rho_1d(r0, {1.7, 1.7}, 1e-3, 50);
  EXPECT_LE(drift(traj.states.back(), r0), 1e-13);
}

TEST(RhoDirect, AffineCubeIsSteady) {
  auto g = ff::build_grid_1d(1.0, 32);
  const auto r0 = ff::ScalarField::from_function(g, [](double x, double) { return std::cbrt(0.5 + 2.0 * x); });
  const auto traj = rho::solve_rho_1d(r0, {r0[0], r0[32]}, 1e-2, 200);
  EXPECT_LE(drift(traj.states.back(), r0), 1e-10);
  for (double d : traj.defects) EXPECT_LE(d, 1e-9);  // round-off through 1/h^4
}

TEST(RhoDirect, NegationSymmetryIsExact) {
  auto g = ff::build_grid_1d(1.0, 24);
  auto r = bumpy(g).vector();
  std::vector<double> neg(r.size());
  for (std::size_t n = 0; n < r.size(); ++n) neg[n] = -r[n];
  const std::pair<double, double> rb{r.front(), r.back()};
  for (int step = 0; step < 10; ++step) {
    r = rho::rho_step(*g, r, rb, 1e-5);
    neg = rho::rho_step(*g, neg, {-rb.first, -rb.second}, 1e-5);
    for (std::size_t n = 0; n < r.size(); ++n) ASSERT_EQ(neg[n], -r[n]);
  }
}

TEST(RhoDirect, BoundaryValuesHeldAndDefectSmall) {
  auto g = ff::build_grid_1d(1.0, 24);
  const auto r0 = bumpy(g);
  const auto traj = rho::solve_rho_1d(r0, {r0[0], r0[24]}, 1e-4, 100);
  for (const auto& s : traj.states) {
    EXPECT_EQ(s[0], r0[0]);
    EXPECT_EQ(s[24], r0[24]);
  }
  ASSERT_EQ(traj.defects.size(), 100u);
  // Lagging rho^2 costs O(dt |rho' - rho|) per step.
  for (double d : traj.defects) EXPECT_LE(d, 1e-5);
}

TEST(RhoDirect, SmoothedProfileFlattens) {
  auto g = ff::build_grid_1d(1.0, 32);
  const auto r0 = bumpy(g);
  const auto traj = rho::solve_rho_1d(r0, {r0[0], r0[32]}, 0.05, 200);
  // Long-time limit is the affine-cube equilibrium through the end values.
  const auto eq = ff::ScalarField::from_function(g, [](double x, double) { return std::cbrt(1.0 + 0.2 * x); });
  EXPECT_LT(drift(traj.states.back(), eq), 0.1 * drift(r0, eq));
}

TEST(RhoDirect, ValidatesInput) {
  auto g1 = ff::build_grid_1d(1.0, 3);
  EXPECT_THROW(rho::solve_rho_1d(ff::ScalarField::constant(g1, 1.0), {1, 1}, 1, 1), ff::ValidationError);
  auto g2 = ff::build_grid_2d(1.0, 1.0, 4, 4);
  EXPECT_THROW(rho::solve_rho_1d(ff::ScalarField::constant(g2, 1.0), {1, 1}, 1, 1), ff::ValidationError);
  auto g = ff::build_grid_1d(1.0, 8);
  EXPECT_THROW(rho::solve_rho_1d(ff::ScalarField::constant(g, -1.0), {1, 1}, 1, 1), ff::ValidationError);
  EXPECT_THROW(rho::solve_rho_1d(ff::ScalarField::constant(g, 1.0), {0, 1}, 1, 1), ff::ValidationError);
  EXPECT_THROW(rho::solve_rho_1d(ff::ScalarField::constant(g, 1.0), {1, 1}, 1, 0), ff::ValidationError);
}

TEST(RhoDirect, ReportsLossOfPositivity) {
  // A facet next to a terrace under a large step: the fourth-order update
  // undershoots below zero on the low side of the jump.
  auto g = ff::build_grid_1d(1.0, 32);
  const auto r0 = ff::ScalarField::from_function(g, [](double x, double) { return x < 0.5 ? 0.01 : 1.0; });
  try {
    rho::solve_rho_1d(r0, {r0[0], r0[32]}, 2.0, 20);
    FAIL() << "expected PositivityError";
  } catch (const ff::PositivityError& e) {
    EXPECT_EQ(e.level(), 1u);
  }
}

TEST(RhoDirect, TimeInterpolation) {
  auto g = ff::build_grid_1d(1.0, 16);
  const auto r0 = bumpy(g);
  const auto traj = rho::solve_rho_1d(r0, {r0[0], r0[16]}, 1e-4, 4);
  const auto mid = traj.at(0.5 * traj.dt);
  for (std::size_t n = 0; n < mid.size(); ++n) {
    EXPECT_NEAR(mid[n], 0.5 * (traj.states[0][n] + traj.states[1][n]), 1e-15);
  }
  EXPECT_EQ(drift(traj.at(traj.final_time()), traj.states.back()), 0.0);
  EXPECT_THROW(traj.at(1.0), ff::ValidationError);
}

TEST(CrossValidate, SteadyDataBothSolversHold) {
  auto g = ff::build_grid_1d(1.0, 16);
  auto u0 = ff::ScalarField::from_function(g, [](double x, double) { return x * x / 2; });
  const ff::ProblemData data(u0, ff::ScalarField::constant(g, 1.0), 1.0, u0);
  ff::StepperConfig cfg;
  const auto traj = ff::run_rothe(data, 0.1, 5, cfg);
  const auto [r0, rb] = rho::slope_data_from(data);
  const auto rt = rho::solve_rho_1d(r0, rb, 0.1, 5);
  std::vector<double> times;
  for (std::size_t k = 0; k <= 5; ++k) times.push_back(traj.time(k));
  for (const auto& row : rho::cross_validate(traj, rt, times, cfg.fp_tol)) {
    EXPECT_LE(row.cross_error, 10 * cfg.fp_tol);
    EXPECT_LE(row.identity_error, 10 * cfg.fp_tol);
    EXPECT_LE(row.identity_error, row.identity_bound + 1e-15);
  }
}

TEST(CrossValidate, RejectsDifferentGrids) {
  auto g = ff::build_grid_1d(1.0, 16);
  auto u0 = ff::ScalarField::from_function(g, [](double x, double) { return x * x / 2; });
  const ff::ProblemData data(u0, ff::ScalarField::constant(g, 1.0), 1.0, u0);
  const auto traj = ff::run_rothe(data, 0.1, 2, {});
  auto g2 = ff::build_grid_1d(1.0, 8);
  const auto rt = rho::solve_rho_1d(ff::ScalarField::constant(g2, 1.0), {1, 1}, 0.1, 2);
  const std::vector<double> times{0.1};
  EXPECT_THROW(rho::cross_validate(traj, rt, times, 1e-10), ff::ValidationError);
}

#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "facetflow/elliptic.hpp"
#include "facetflow/grid.hpp"
#include "facetflow/problem.hpp"
#include "facetflow/rho_direct.hpp"
#include "facetflow/stepper.hpp"

namespace ff = facetflow;

namespace {

ff::ScalarField wave(const ff::GridPtr& grid) {
  return ff::ScalarField::from_function(grid, [](double x, double y) {
    return std::sin(3.0 * x) * std::cos(2.0 * y) + x * x;
  });
}

void BM_Laplacian2D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto grid = ff::build_grid_2d(1.0, 1.0, n, n);
  const auto f = wave(grid);
  std::vector<double> out(grid->node_count());
  for (auto _ : state) {
    ff::laplacian_into(*grid, f.values(), out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid->node_count()));
}
BENCHMARK(BM_Laplacian2D)->Arg(64)->Arg(256);

void BM_Poisson1DBanded(benchmark::State& state) {
  auto grid = ff::build_grid_1d(1.0, static_cast<int>(state.range(0)));
  const auto rhs = wave(grid);
  const auto g = ff::ScalarField::constant(grid, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(ff::solve_poisson(rhs, g).residual);
}
BENCHMARK(BM_Poisson1DBanded)->Arg(256)->Arg(4096);

void BM_Poisson2DConjugateGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto grid = ff::build_grid_2d(1.0, 1.0, n, n);
  const auto rhs = wave(grid);
  const auto g = ff::ScalarField::constant(grid, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(ff::solve_poisson(rhs, g).iterations);
}
BENCHMARK(BM_Poisson2DConjugateGradient)->Arg(32)->Arg(64);

ff::ProblemData generic_1d(int cells) {
  auto grid = ff::build_grid_1d(1.0, cells);
  // Laplacian 1 + 0.5 x + 0.3 sin(2 pi x), integrated twice in closed form.
  auto u0 = ff::ScalarField::from_function(grid, [](double x, double) {
    return 0.5 * x * x + x * x * x / 12.0 - 0.3 * std::sin(2.0 * M_PI * x) / (4.0 * M_PI * M_PI);
  });
  auto b1 = ff::laplacian_with_boundary_extension(u0);
  const double c0 = 0.5 * b1.min();
  return ff::ProblemData(u0, b1, c0, u0);
}

void BM_SolveStep1D(benchmark::State& state) {
  const auto data = generic_1d(static_cast<int>(state.range(0)));
  ff::StepperConfig cfg;
  cfg.tau = 1e-4;
  for (auto _ : state) benchmark::DoNotOptimize(ff::solve_step(data.u0(), data, cfg).iters);
}
BENCHMARK(BM_SolveStep1D)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_RhoStep(benchmark::State& state) {
  auto grid = ff::build_grid_1d(1.0, static_cast<int>(state.range(0)));
  std::vector<double> rho(grid->node_count());
  for (std::size_t n = 0; n < rho.size(); ++n) rho[n] = 1.0 + 0.2 * std::sin(M_PI * grid->coord(n)[0]);
  for (auto _ : state) benchmark::DoNotOptimize(ff::rho::rho_step(*grid, rho, {1.0, 1.0}, 1e-6).data());
}
BENCHMARK(BM_RhoStep)->Arg(64)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();

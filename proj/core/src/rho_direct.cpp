#include "facetflow/rho_direct.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "facetflow/error.hpp"

namespace facetflow::rho {

namespace {

// Pentadiagonal system stored by diagonals: band[d][r] holds A(r, r + d - 2).
struct Pentadiagonal {
  explicit Pentadiagonal(std::size_t n) : size(n) {
    for (auto& d : band) d.assign(n, 0.0);
  }
  double& at(std::size_t r, std::size_t c) { return band[c + 2 - r][r]; }
  std::size_t size;
  std::array<std::vector<double>, 5> band;
};

// Gaussian elimination without pivoting. The matrices solved here are
// diagonally similar to I + SPD, so every leading minor is positive.
std::vector<double> solve_banded(Pentadiagonal a, std::vector<double> b) {
  const std::size_t n = a.size;
  for (std::size_t k = 0; k < n; ++k) {
    const double pivot = a.at(k, k);
    for (std::size_t r = k + 1; r <= std::min(n - 1, k + 2); ++r) {
      const double factor = a.at(r, k) / pivot;
      if (factor == 0.0) continue;
      for (std::size_t c = k; c <= std::min(n - 1, k + 2); ++c) a.at(r, c) -= factor * a.at(k, c);
      b[r] -= factor * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t c = k + 1; c <= std::min(n - 1, k + 2); ++c) s -= a.at(k, c) * x[c];
    x[k] = s / a.at(k, k);
  }
  return x;
}

void require_slope_grid(const Grid& grid) {
  if (grid.dim() != 1) throw ValidationError("the slope solver is one-dimensional");
  if (grid.node_count() < 5) throw ValidationError("the slope solver needs at least 5 nodes");
}

// Fourth difference of w at interior node i using ghosts w_{-1} = 2 w_0 - w_1
// and w_{n+1} = 2 w_n - w_{n-1}.
double d4_at(std::span<const double> w, std::size_t i, double inv_h4) {
  const std::size_t last = w.size() - 1;
  auto val = [&](long idx) -> double {
    if (idx < 0) return 2.0 * w[0] - w[1];
    if (idx > static_cast<long>(last)) return 2.0 * w[last] - w[last - 1];
    return w[static_cast<std::size_t>(idx)];
  };
  const long c = static_cast<long>(i);
  return (val(c - 2) - 4.0 * val(c - 1) + 6.0 * val(c) - 4.0 * val(c + 1) + val(c + 2)) * inv_h4;
}

}  // namespace

std::vector<double> fourth_difference_of_cube(const Grid& grid, std::span<const double> rho) {
  require_slope_grid(grid);
  const double h = grid.spacing(0);
  const double inv_h4 = 1.0 / (h * h * h * h);
  std::vector<double> w(rho.size());
  for (std::size_t n = 0; n < w.size(); ++n) w[n] = rho[n] * rho[n] * rho[n];
  std::vector<double> out(rho.size(), 0.0);
  for (std::size_t i = 1; i + 1 < rho.size(); ++i) out[i] = d4_at(w, i, inv_h4);
  return out;
}

std::vector<double> rho_step(const Grid& grid, std::span<const double> rho,
                             std::pair<double, double> rho_b, double dt) {
  require_slope_grid(grid);
  const std::size_t n_nodes = rho.size();
  const std::size_t m = n_nodes - 2;
  std::vector<double> current(rho.begin(), rho.end());
  current.front() = rho_b.first;
  current.back() = rho_b.second;

  const std::vector<double> d4w = fourth_difference_of_cube(grid, current);
  const double h = grid.spacing(0);
  const double inv_h4 = 1.0 / (h * h * h * h);

  // Interior operator K^2 / h^4 where K = tridiag(-1, 2, -1); the ghost rows
  // turn the leading and trailing 6 into 5.
  Pentadiagonal a(m);
  std::vector<double> rhs(m);
  for (std::size_t r = 0; r < m; ++r) {
    const double p = current[r + 1] * current[r + 1];
    for (long off = -2; off <= 2; ++off) {
      const long c = static_cast<long>(r) + off;
      if (c < 0 || c >= static_cast<long>(m)) continue;
      double k2 = 0.0;
      switch (std::abs(off)) {
        case 0: k2 = (r == 0 || r + 1 == m) ? 5.0 : 6.0; break;
        case 1: k2 = -4.0; break;
        default: k2 = 1.0; break;
      }
      const double q = 3.0 * current[static_cast<std::size_t>(c) + 1] *
                       current[static_cast<std::size_t>(c) + 1];
      a.at(r, static_cast<std::size_t>(c)) = dt * p * k2 * inv_h4 * q;
    }
    a.at(r, r) += 1.0;
    rhs[r] = -dt * p * d4w[r + 1];
  }
  const std::vector<double> delta = solve_banded(std::move(a), std::move(rhs));
  std::vector<double> next(current);
  for (std::size_t r = 0; r < m; ++r) next[r + 1] += delta[r];
  return next;
}

double nonlinear_defect(const Grid& grid, std::span<const double> rho_old,
                        std::span<const double> rho_new, double dt) {
  const std::vector<double> d4 = fourth_difference_of_cube(grid, rho_new);
  double defect = 0.0;
  for (std::size_t i = 1; i + 1 < rho_new.size(); ++i) {
    const double r = rho_new[i] - rho_old[i] + dt * rho_new[i] * rho_new[i] * d4[i];
    defect = std::max(defect, std::abs(r));
  }
  return defect;
}

ScalarField RhoTrajectory::at(double t) const {
  if (states.empty()) throw ValidationError("empty slope trajectory");
  const double T = final_time();
  const double slack = 1e-12 * (T > 0.0 ? T : 1.0);
  if (t < -slack || t > T + slack) {
    std::ostringstream msg;
    msg << "slope trajectory time " << t << " outside [0, " << T << "]";
    throw ValidationError(msg.str());
  }
  if (states.size() == 1) return states.front();
  const double r = std::clamp(t / dt, 0.0, static_cast<double>(states.size() - 1));
  auto lo = static_cast<std::size_t>(std::floor(r));
  if (lo >= states.size() - 1) return states.back();
  const double lambda = r - static_cast<double>(lo);
  if (lambda < 1e-9) return states[lo];
  if (lambda > 1.0 - 1e-9) return states[lo + 1];
  std::vector<double> v(states[lo].size());
  for (std::size_t n = 0; n < v.size(); ++n) {
    v[n] = (1.0 - lambda) * states[lo][n] + lambda * states[lo + 1][n];
  }
  return ScalarField(grid, std::move(v));
}

RhoTrajectory solve_rho_1d(const ScalarField& rho0, std::pair<double, double> rho_b, double T,
                           std::size_t n_steps) {
  const Grid& grid = rho0.grid();
  require_slope_grid(grid);
  if (!(T > 0.0) || n_steps == 0) throw ValidationError("slope march needs T > 0 and n_steps >= 1");
  if (!(rho_b.first > 0.0) || !(rho_b.second > 0.0)) {
    throw ValidationError("slope boundary values must be positive");
  }
  for (std::size_t n = 0; n < rho0.size(); ++n) {
    if (!(rho0[n] > 0.0)) {
      std::ostringstream msg;
      msg << "initial slope must be positive, got " << rho0[n] << " at node " << n;
      throw ValidationError(msg.str());
    }
  }

  RhoTrajectory traj;
  traj.grid = rho0.grid_ptr();
  traj.dt = T / static_cast<double>(n_steps);
  traj.boundary = rho_b;
  std::vector<double> start(rho0.vector());
  start.front() = rho_b.first;
  start.back() = rho_b.second;
  traj.states.emplace_back(traj.grid, start);
  traj.states.reserve(n_steps + 1);
  traj.defects.reserve(n_steps);

  std::vector<double> current = std::move(start);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    std::vector<double> next = rho_step(grid, current, rho_b, traj.dt);
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (!(next[i] > 0.0)) {
        std::ostringstream msg;
        msg << "slope lost positivity at time level " << n << ", node " << i << " (rho = "
            << next[i] << ")";
        throw PositivityError(msg.str(), n);
      }
    }
    traj.defects.push_back(nonlinear_defect(grid, current, next, traj.dt));
    traj.states.emplace_back(traj.grid, next);
    current = std::move(next);
  }
  return traj;
}

std::vector<CrossValidationRow> cross_validate(const Trajectory& traj, const RhoTrajectory& rho,
                                               std::span<const double> times, double fp_tol) {
  if (!rho.grid || !(traj.grid() == *rho.grid)) {
    throw ValidationError("height and slope trajectories use different grids");
  }
  const Grid& grid = traj.grid();
  std::vector<CrossValidationRow> rows;
  rows.reserve(times.size());
  for (double t : times) {
    const Interpolants ip = eval_interpolants(traj, t);
    const ScalarField direct = rho.at(t);
    CrossValidationRow row;
    row.t = t;
    for (std::size_t n = 0; n < grid.node_count(); ++n) {
      row.cross_error = std::max(row.cross_error, std::abs(ip.rho_bar[n] - direct[n]));
    }
    const ScalarField lap = apply_laplacian(ip.u_bar);
    for (auto node : grid.interior_nodes()) {
      row.identity_error =
          std::max(row.identity_error, std::abs(1.0 / lap[node] - ip.rho_bar[node]));
    }
    const double rmax = ip.rho_bar.max_abs();
    row.identity_bound = fp_tol * rmax * rmax;
    rows.push_back(row);
  }
  return rows;
}

std::pair<ScalarField, std::pair<double, double>> slope_data_from(const ProblemData& data) {
  const Grid& grid = data.grid();
  require_slope_grid(grid);
  const ScalarField lap = apply_laplacian(data.u0());
  std::vector<double> rho(grid.node_count());
  for (auto node : grid.interior_nodes()) rho[node] = 1.0 / lap[node];
  for (auto node : grid.boundary_nodes()) rho[node] = 1.0 / data.b1()[node];
  const std::pair<double, double> rho_b{1.0 / data.b1()[0], 1.0 / data.b1()[grid.node_count() - 1]};
  return {ScalarField(data.grid_ptr(), std::move(rho)), rho_b};
}

}  // namespace facetflow::rho

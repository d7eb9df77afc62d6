#include "dense_oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace facetflow::testing {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

}  // namespace

std::vector<double> dense_dirichlet_solve(const Grid& grid, const std::vector<double>& a, double c,
                                          const std::vector<double>& rhs, const std::vector<double>& g) {
  const auto& interior = grid.interior_nodes();
  const auto m = static_cast<Eigen::Index>(interior.size());
  MatrixXd A = MatrixXd::Zero(m, m);
  VectorXd b(m);
  const int nx = grid.nodes_along(0);
  const int ny = grid.nodes_along(1);
  for (Eigen::Index r = 0; r < m; ++r) {
    const std::size_t node = interior[static_cast<std::size_t>(r)];
    const auto [i, j] = grid.ij(node);
    b(r) = rhs[node];
    A(r, r) += c;
    auto couple = [&](int ii, int jj, double h) {
      if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) throw std::logic_error("neighbour outside grid");
      const std::size_t nb = grid.index(ii, jj);
      const double w = 0.5 * (a[node] + a[nb]) / (h * h);
      A(r, r) += w;
      if (grid.is_boundary(nb)) {
        b(r) += w * g[nb];
      } else {
        A(r, grid.interior_slot(nb)) -= w;
      }
    };
    couple(i - 1, j, grid.spacing(0));
    couple(i + 1, j, grid.spacing(0));
    if (grid.dim() == 2) {
      couple(i, j - 1, grid.spacing(1));
      couple(i, j + 1, grid.spacing(1));
    }
  }
  const VectorXd x = A.partialPivLu().solve(b);
  std::vector<double> out = g;
  for (Eigen::Index r = 0; r < m; ++r) out[interior[static_cast<std::size_t>(r)]] = x(r);
  return out;
}

NewtonResult dense_newton_step(const Grid& grid, const std::vector<double>& u_prev,
                               const ProblemData& data, double tau) {
  if (grid.dim() != 1) throw std::invalid_argument("dense_newton_step is 1D only");
  const int n = grid.cells(0);
  const int m = n - 1;
  const double h2 = grid.spacing(0) * grid.spacing(0);
  const double u_left = data.b0()[0], u_right = data.b0()[static_cast<std::size_t>(n)];
  const double p_left = -std::log(data.b1()[0]);
  const double p_right = -std::log(data.b1()[static_cast<std::size_t>(n)]);

  // x = [u_1..u_m, psi_1..psi_m]
  VectorXd x(2 * m);
  for (int i = 1; i <= m; ++i) {
    const double lap = (u_prev[i - 1] - 2.0 * u_prev[i] + u_prev[i + 1]) / h2;
    x(i - 1) = u_prev[i];
    x(m + i - 1) = lap > 0.0 ? -std::log(lap) : 0.0;
  }

  auto full = [&](const VectorXd& v) {
    std::vector<double> u(n + 1), p(n + 1);
    u[0] = u_left;
    u[n] = u_right;
    p[0] = p_left;
    p[n] = p_right;
    for (int i = 1; i <= m; ++i) {
      u[i] = v(i - 1);
      p[i] = v(m + i - 1);
    }
    return std::make_pair(u, p);
  };
  auto residual = [&](const VectorXd& v) {
    const auto [u, p] = full(v);
    VectorXd F(2 * m);
    for (int i = 1; i <= m; ++i) {
      const double e_l = std::exp(3.0 * p[i - 1]), e_c = std::exp(3.0 * p[i]), e_r = std::exp(3.0 * p[i + 1]);
      F(i - 1) = (u[i] - u_prev[i]) / tau - (e_l - 2.0 * e_c + e_r) / h2 + tau * p[i];
      F(m + i - 1) = (u[i - 1] - 2.0 * u[i] + u[i + 1]) / h2 - std::exp(-p[i]);
    }
    return F;
  };
  auto jacobian = [&](const VectorXd& v) {
    const auto [u, p] = full(v);
    MatrixXd J = MatrixXd::Zero(2 * m, 2 * m);
    for (int i = 1; i <= m; ++i) {
      const int r = i - 1;
      J(r, r) = 1.0 / tau;
      J(r, m + r) = 6.0 * std::exp(3.0 * p[i]) / h2 + tau;
      if (i > 1) J(r, m + r - 1) = -3.0 * std::exp(3.0 * p[i - 1]) / h2;
      if (i < m) J(r, m + r + 1) = -3.0 * std::exp(3.0 * p[i + 1]) / h2;
      J(m + r, r) = -2.0 / h2;
      if (i > 1) J(m + r, r - 1) = 1.0 / h2;
      if (i < m) J(m + r, r + 1) = 1.0 / h2;
      J(m + r, m + r) = std::exp(-p[i]);
    }
    return J;
  };

  NewtonResult out;
  VectorXd F = residual(x);
  double norm = F.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < 200 && norm > 1e-12; ++it) {
    const VectorXd dx = jacobian(x).partialPivLu().solve(-F);
    double step = 1.0;
    VectorXd trial;
    double trial_norm = 0.0;
    for (int ls = 0; ls < 40; ++ls) {
      trial = x + step * dx;
      trial_norm = residual(trial).lpNorm<Eigen::Infinity>();
      if (std::isfinite(trial_norm) && trial_norm < (1.0 - 1e-4 * step) * norm) break;
      step *= 0.5;
    }
    x = trial;
    F = residual(x);
    norm = F.lpNorm<Eigen::Infinity>();
    out.iterations = it + 1;
  }
  auto [u, p] = full(x);
  out.u = std::move(u);
  out.psi = std::move(p);
  out.residual = norm;
  return out;
}

std::vector<double> reference_d4(const Grid& grid, const std::vector<double>& w) {
  const int n = grid.cells(0);
  const double h4 = std::pow(grid.spacing(0), 4);
  auto at = [&](int i) {
    if (i == -1) return 2.0 * w[0] - w[1];
    if (i == n + 1) return 2.0 * w[n] - w[n - 1];
    return w[static_cast<std::size_t>(i)];
  };
  std::vector<double> out(w.size(), 0.0);
  for (int i = 1; i < n; ++i) {
    out[i] = (at(i - 2) - 4.0 * at(i - 1) + 6.0 * at(i) - 4.0 * at(i + 1) + at(i + 2)) / h4;
  }
  return out;
}

std::vector<double> dense_newton_rho_step(const Grid& grid, const std::vector<double>& rho, double dt) {
  const int n = grid.cells(0);
  const int m = n - 1;
  auto full = [&](const VectorXd& v) {
    std::vector<double> r = rho;
    for (int i = 1; i <= m; ++i) r[i] = v(i - 1);
    return r;
  };
  auto residual = [&](const VectorXd& v) {
    const auto r = full(v);
    std::vector<double> w(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) w[i] = r[i] * r[i] * r[i];
    const auto d4 = reference_d4(grid, w);
    VectorXd F(m);
    for (int i = 1; i <= m; ++i) F(i - 1) = r[i] - rho[i] + dt * r[i] * r[i] * d4[i];
    return F;
  };
  VectorXd x(m);
  for (int i = 1; i <= m; ++i) x(i - 1) = rho[i];
  VectorXd F = residual(x);
  for (int it = 0; it < 100 && F.lpNorm<Eigen::Infinity>() > 1e-14; ++it) {
    // Jacobian by central differences of the exact residual; the dense solve
    // is what makes this an oracle, not the derivative formula.
    MatrixXd J(m, m);
    for (int c = 0; c < m; ++c) {
      const double eps = 1e-7 * std::max(1.0, std::abs(x(c)));
      VectorXd xp = x, xm = x;
      xp(c) += eps;
      xm(c) -= eps;
      J.col(c) = (residual(xp) - residual(xm)) / (2.0 * eps);
    }
    x -= J.partialPivLu().solve(F);
    F = residual(x);
  }
  return full(x);
}

double brute_force_holder(const std::vector<double>& x, const std::vector<double>& t,
                          const std::vector<double>& f, double ax, double at) {
  long double best = 0.0L;
  for (std::size_t a = 0; a < f.size(); ++a) {
    for (std::size_t b = 0; b < f.size(); ++b) {
      if (a == b || (x[a] == x[b] && t[a] == t[b])) continue;
      const long double num = std::fabs(static_cast<long double>(f[a]) - f[b]);
      const long double den = std::pow(std::fabs(static_cast<long double>(x[a]) - x[b]), (long double)ax) +
                              std::pow(std::fabs(static_cast<long double>(t[a]) - t[b]), (long double)at);
      if (num / den > best) best = num / den;
    }
  }
  return static_cast<double>(best);
}

std::vector<double> dense_height_from_laplacian(const Grid& grid, const std::vector<double>& lap,
                                                double left, double right) {
  const int n = grid.cells(0);
  const double h2 = grid.spacing(0) * grid.spacing(0);
  MatrixXd A = MatrixXd::Zero(n - 1, n - 1);
  VectorXd b(n - 1);
  for (int i = 1; i < n; ++i) {
    A(i - 1, i - 1) = -2.0 / h2;
    if (i > 1) A(i - 1, i - 2) = 1.0 / h2;
    if (i < n - 1) A(i - 1, i) = 1.0 / h2;
    b(i - 1) = lap[i];
  }
  b(0) -= left / h2;
  b(n - 2) -= right / h2;
  const VectorXd x = A.partialPivLu().solve(b);
  std::vector<double> u(n + 1);
  u[0] = left;
  u[n] = right;
  for (int i = 1; i < n; ++i) u[i] = x(i - 1);
  return u;
}

StepDraw random_step_draw(std::mt19937_64& rng, double tau) {
  GridPtr grid = build_grid_1d(1.0, 8);
  const std::size_t nodes = grid->node_count();
  std::vector<double> b1(nodes), lap0(nodes), lap(nodes);
  std::normal_distribution<double> z(0.0, 1.0);
  for (std::size_t n = 0; n < nodes; ++n) {
    b1[n] = 1.0 + 0.5 * grid->coord(n)[0];
    lap0[n] = b1[n];
    lap[n] = b1[n] * std::exp(0.3 * z(rng));
  }
  const auto u0 = dense_height_from_laplacian(*grid, lap0, 0.0, 0.3);
  auto u_prev = dense_height_from_laplacian(*grid, lap, 0.0, 0.3);
  ProblemData data(ScalarField(grid, u0), ScalarField(grid, b1), 1.0, ScalarField(grid, u0));
  return StepDraw{grid, std::move(data), std::move(u_prev), tau};
}

}  // namespace facetflow::testing

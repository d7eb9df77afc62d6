#include "facetflow/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "facetflow/error.hpp"

namespace facetflow {

namespace {

std::size_t x_edge_count(const Grid& g) {
  return static_cast<std::size_t>(g.cells(0)) * static_cast<std::size_t>(g.nodes_along(1));
}

std::size_t y_edge_count(const Grid& g) {
  return g.dim() == 2 ? static_cast<std::size_t>(g.nodes_along(0)) *
                            static_cast<std::size_t>(g.cells(1))
                      : 0;
}

void check_edges(std::span<const double> e, const char* axis) {
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (!(e[k] > 0.0) || !std::isfinite(e[k])) {
      std::ostringstream msg;
      msg << "elliptic coefficient must be positive: " << axis << "-edge " << k << " = " << e[k];
      throw ValidationError(msg.str());
    }
  }
}

double inf_norm_interior(const Grid& g, std::span<const double> v) {
  double m = 0.0;
  for (auto node : g.interior_nodes()) m = std::max(m, std::abs(v[node]));
  return m;
}

double inf_norm_boundary(const Grid& g, std::span<const double> v) {
  double m = 0.0;
  for (auto node : g.boundary_nodes()) m = std::max(m, std::abs(v[node]));
  return m;
}

}  // namespace

EllipticOperator::EllipticOperator(GridPtr grid, std::vector<double> ex, std::vector<double> ey,
                                   double c)
    : grid_(std::move(grid)), edge_x_(std::move(ex)), edge_y_(std::move(ey)), reaction_(c) {
  if (edge_x_.size() != x_edge_count(*grid_) || edge_y_.size() != y_edge_count(*grid_)) {
    throw ValidationError("edge coefficient arrays do not match the grid");
  }
  check_edges(edge_x_, "x");
  check_edges(edge_y_, "y");
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw ValidationError("reaction coefficient must be finite and nonnegative");
  }
}

EllipticOperator EllipticOperator::from_nodal(const ScalarField& a, double reaction) {
  const Grid& g = a.grid();
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (!(a[n] > 0.0)) {
      std::ostringstream msg;
      msg << "elliptic coefficient must be positive: a = " << a[n] << " at node " << n;
      throw ValidationError(msg.str());
    }
  }
  const int nx = g.nodes_along(0);
  const int ny = g.nodes_along(1);
  std::vector<double> ex(x_edge_count(g));
  std::vector<double> ey(y_edge_count(g));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      ex[static_cast<std::size_t>(j) * g.cells(0) + i] =
          0.5 * (a[g.index(i, j)] + a[g.index(i + 1, j)]);
    }
  }
  if (g.dim() == 2) {
    for (int j = 0; j + 1 < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        ey[static_cast<std::size_t>(j) * nx + i] = 0.5 * (a[g.index(i, j)] + a[g.index(i, j + 1)]);
      }
    }
  }
  return EllipticOperator(a.grid_ptr(), std::move(ex), std::move(ey), reaction);
}

EllipticOperator EllipticOperator::from_edges(GridPtr grid, std::vector<double> edge_x,
                                              std::vector<double> edge_y, double reaction) {
  return EllipticOperator(std::move(grid), std::move(edge_x), std::move(edge_y), reaction);
}

EllipticOperator EllipticOperator::laplace(GridPtr grid) {
  std::vector<double> ex(x_edge_count(*grid), 1.0);
  std::vector<double> ey(y_edge_count(*grid), 1.0);
  return EllipticOperator(std::move(grid), std::move(ex), std::move(ey), 0.0);
}

void EllipticOperator::apply(std::span<const double> u, std::span<double> out) const {
  const Grid& g = *grid_;
  const double ihx2 = 1.0 / (g.spacing(0) * g.spacing(0));
  const auto nx = static_cast<std::size_t>(g.nodes_along(0));
  const auto cx = static_cast<std::size_t>(g.cells(0));
  for (auto node : g.interior_nodes()) {
    const auto [i, j] = g.ij(node);
    const std::size_t ex = static_cast<std::size_t>(j) * cx + static_cast<std::size_t>(i);
    double v = ihx2 * (edge_x_[ex] * (u[node] - u[node + 1]) +
                       edge_x_[ex - 1] * (u[node] - u[node - 1]));
    if (g.dim() == 2) {
      const double ihy2 = 1.0 / (g.spacing(1) * g.spacing(1));
      const std::size_t ey = static_cast<std::size_t>(j) * nx + static_cast<std::size_t>(i);
      v += ihy2 * (edge_y_[ey] * (u[node] - u[node + nx]) +
                   edge_y_[ey - nx] * (u[node] - u[node - nx]));
    }
    out[node] = v + reaction_ * u[node];
  }
}

std::vector<double> EllipticOperator::diagonal() const {
  const Grid& g = *grid_;
  std::vector<double> d(g.interior_nodes().size());
  const double ihx2 = 1.0 / (g.spacing(0) * g.spacing(0));
  const auto nx = static_cast<std::size_t>(g.nodes_along(0));
  const auto cx = static_cast<std::size_t>(g.cells(0));
  for (std::size_t s = 0; s < d.size(); ++s) {
    const auto node = g.interior_nodes()[s];
    const auto [i, j] = g.ij(node);
    const std::size_t ex = static_cast<std::size_t>(j) * cx + static_cast<std::size_t>(i);
    double v = ihx2 * (edge_x_[ex] + edge_x_[ex - 1]);
    if (g.dim() == 2) {
      const double ihy2 = 1.0 / (g.spacing(1) * g.spacing(1));
      const std::size_t ey = static_cast<std::size_t>(j) * nx + static_cast<std::size_t>(i);
      v += ihy2 * (edge_y_[ey] + edge_y_[ey - nx]);
    }
    d[s] = v + reaction_;
  }
  return d;
}

std::vector<double> EllipticOperator::dense_interior_matrix() const {
  const Grid& g = *grid_;
  const std::size_t m = g.interior_nodes().size();
  std::vector<double> dense(m * m, 0.0);
  std::vector<double> e(g.node_count(), 0.0);
  std::vector<double> col(g.node_count(), 0.0);
  for (std::size_t s = 0; s < m; ++s) {
    e[g.interior_nodes()[s]] = 1.0;
    apply(e, col);
    for (std::size_t r = 0; r < m; ++r) dense[r * m + s] = col[g.interior_nodes()[r]];
    e[g.interior_nodes()[s]] = 0.0;
  }
  return dense;
}

void LinearSolveConfig::validate() const {
  if (!(cg_rel_tol > 0.0)) throw ValidationError("cg_rel_tol must be positive");
}

namespace {

// Right-hand side of the interior system: rhs minus the operator applied to
// the boundary lift (g on boundary, 0 inside).
std::vector<double> interior_rhs(const EllipticOperator& op, std::span<const double> rhs,
                                 std::span<const double> g) {
  const Grid& grid = op.grid();
  std::vector<double> lift(grid.node_count(), 0.0);
  for (auto node : grid.boundary_nodes()) lift[node] = g[node];
  std::vector<double> applied(grid.node_count(), 0.0);
  op.apply(lift, applied);
  std::vector<double> b(grid.interior_nodes().size());
  for (std::size_t s = 0; s < b.size(); ++s) {
    const auto node = grid.interior_nodes()[s];
    b[s] = rhs[node] - applied[node];
  }
  return b;
}

// Thomas elimination on the symmetric tridiagonal 1D interior system.
void solve_tridiagonal(const EllipticOperator& op, std::span<const double> b,
                       std::span<double> x) {
  const Grid& g = op.grid();
  const std::size_t m = b.size();
  const double ihx2 = 1.0 / (g.spacing(0) * g.spacing(0));
  const auto ex = op.edge_x();
  std::vector<double> diag(m), off(m > 0 ? m - 1 : 0);
  for (std::size_t s = 0; s < m; ++s) {
    diag[s] = ihx2 * (ex[s] + ex[s + 1]) + op.reaction();
    if (s + 1 < m) off[s] = -ihx2 * ex[s + 1];
  }
  std::vector<double> c(m), d(m);
  c[0] = m > 1 ? off[0] / diag[0] : 0.0;
  d[0] = b[0] / diag[0];
  for (std::size_t s = 1; s < m; ++s) {
    const double denom = diag[s] - off[s - 1] * c[s - 1];
    c[s] = s + 1 < m ? off[s] / denom : 0.0;
    d[s] = (b[s] - off[s - 1] * d[s - 1]) / denom;
  }
  x[m - 1] = d[m - 1];
  for (std::size_t s = m - 1; s-- > 0;) x[s] = d[s] - c[s] * x[s + 1];
}

std::size_t conjugate_gradient(const EllipticOperator& op, std::span<const double> b,
                               std::span<double> x, const LinearSolveConfig& cfg, double target) {
  const Grid& g = op.grid();
  const auto& interior = g.interior_nodes();
  const std::size_t m = b.size();
  const std::size_t max_iter = cfg.cg_max_iter > 0 ? cfg.cg_max_iter : 10 * m;

  std::vector<double> inv_diag;
  if (cfg.jacobi_preconditioner) {
    inv_diag = op.diagonal();
    for (double& v : inv_diag) v = 1.0 / v;
  }
  auto precondition = [&](const std::vector<double>& r, std::vector<double>& z) {
    if (inv_diag.empty()) {
      z = r;
    } else {
      for (std::size_t s = 0; s < m; ++s) z[s] = inv_diag[s] * r[s];
    }
  };

  std::vector<double> full(g.node_count(), 0.0), full_out(g.node_count(), 0.0);
  auto apply_interior = [&](std::span<const double> v, std::vector<double>& out) {
    for (std::size_t s = 0; s < m; ++s) full[interior[s]] = v[s];
    op.apply(full, full_out);
    for (std::size_t s = 0; s < m; ++s) out[s] = full_out[interior[s]];
  };

  std::vector<double> r(m), z(m), p(m), ap(m);
  apply_interior(x, ap);
  for (std::size_t s = 0; s < m; ++s) r[s] = b[s] - ap[s];
  precondition(r, z);
  p = z;
  double rz = 0.0;
  for (std::size_t s = 0; s < m; ++s) rz += r[s] * z[s];

  auto rmax = [&] {
    double v = 0.0;
    for (double e : r) v = std::max(v, std::abs(e));
    return v;
  };

  std::size_t it = 0;
  while (rmax() > target) {
    if (it >= max_iter) {
      std::ostringstream msg;
      msg << "conjugate gradient did not converge in " << max_iter
          << " iterations (residual " << rmax() << ")";
      throw SolveError(msg.str(), rmax());
    }
    apply_interior(p, ap);
    double pap = 0.0;
    for (std::size_t s = 0; s < m; ++s) pap += p[s] * ap[s];
    const double alpha = rz / pap;
    for (std::size_t s = 0; s < m; ++s) {
      x[s] += alpha * p[s];
      r[s] -= alpha * ap[s];
    }
    // Recompute the true residual periodically to keep the recurrence honest.
    if ((it + 1) % 50 == 0) {
      apply_interior(x, ap);
      for (std::size_t s = 0; s < m; ++s) r[s] = b[s] - ap[s];
    }
    precondition(r, z);
    double rz_new = 0.0;
    for (std::size_t s = 0; s < m; ++s) rz_new += r[s] * z[s];
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t s = 0; s < m; ++s) p[s] = z[s] + beta * p[s];
    ++it;
  }
  return it;
}

}  // namespace

EllipticSolution solve_dirichlet(const EllipticOperator& op, const ScalarField& rhs,
                                 const ScalarField& g, const LinearSolveConfig& cfg) {
  cfg.validate();
  const Grid& grid = op.grid();
  if (!(rhs.grid() == grid) || !(g.grid() == grid)) {
    throw ValidationError("operator, right-hand side and boundary data use different grids");
  }
  const double scale =
      inf_norm_interior(grid, rhs.values()) + inf_norm_boundary(grid, g.values()) + 1.0;

  const std::vector<double> b = interior_rhs(op, rhs.values(), g.values());
  std::vector<double> x(b.size(), 0.0);

  LinearMethod method = cfg.method;
  if (method == LinearMethod::automatic) {
    method = grid.dim() == 1 ? LinearMethod::banded : LinearMethod::conjugate_gradient;
  }
  if (method == LinearMethod::banded && grid.dim() != 1) {
    throw ValidationError("banded elimination is only available on 1D grids");
  }

  std::size_t iterations = 0;
  if (method == LinearMethod::banded) {
    solve_tridiagonal(op, b, x);
  } else {
    iterations = conjugate_gradient(op, b, x, cfg, cfg.cg_rel_tol * scale);
  }

  for (double v : x) {
    if (!std::isfinite(v)) throw SolveError("elliptic solve produced non-finite values", v);
  }
  std::vector<double> u(grid.node_count(), 0.0);
  for (auto node : grid.boundary_nodes()) u[node] = g[node];
  for (std::size_t s = 0; s < x.size(); ++s) u[grid.interior_nodes()[s]] = x[s];

  std::vector<double> applied(grid.node_count(), 0.0);
  op.apply(u, applied);
  double residual = 0.0;
  for (auto node : grid.interior_nodes()) {
    residual = std::max(residual, std::abs(applied[node] - rhs[node]));
  }
  if (!std::isfinite(residual)) {
    throw SolveError("elliptic solve produced non-finite values", residual);
  }
  return EllipticSolution{ScalarField(op.grid_ptr(), std::move(u)), residual, residual / scale,
                          iterations};
}

EllipticSolution solve_poisson(const ScalarField& rhs, const ScalarField& g,
                               const LinearSolveConfig& cfg) {
  return solve_dirichlet(EllipticOperator::laplace(rhs.grid_ptr()), rhs, g, cfg);
}

}  // namespace facetflow

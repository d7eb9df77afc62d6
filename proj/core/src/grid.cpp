#include "facetflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "facetflow/error.hpp"

namespace facetflow {

namespace {

void require_finite(std::span<const double> values) {
  for (std::size_t n = 0; n < values.size(); ++n) {
    if (!std::isfinite(values[n])) {
      std::ostringstream msg;
      msg << "non-finite field value at node " << n;
      throw ValidationError(msg.str());
    }
  }
}

}  // namespace

GridPtr build_grid(int dim, std::span<const double> lengths, std::span<const int> cells) {
  if (dim != 1 && dim != 2) {
    throw ValidationError("grid dimension must be 1 or 2");
  }
  if (lengths.size() != static_cast<std::size_t>(dim) ||
      cells.size() != static_cast<std::size_t>(dim)) {
    throw ValidationError("grid needs one length and one cell count per axis");
  }
  auto grid = std::shared_ptr<Grid>(new Grid());
  grid->dim_ = dim;
  grid->cells_ = {1, 0};
  grid->lengths_ = {1.0, 0.0};
  grid->spacing_ = {1.0, 1.0};
  for (int a = 0; a < dim; ++a) {
    if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) {
      throw ValidationError("grid lengths must be positive and finite");
    }
    if (cells[a] < 2) {
      throw ValidationError("grid needs at least 2 cells per axis (no interior node otherwise)");
    }
    grid->lengths_[a] = lengths[a];
    grid->cells_[a] = cells[a];
    grid->spacing_[a] = lengths[a] / cells[a];
  }

  const int nx = grid->nodes_along(0);
  const int ny = grid->nodes_along(1);
  grid->node_count_ = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  grid->boundary_flag_.assign(grid->node_count_, 0);
  grid->interior_slot_.assign(grid->node_count_, -1);
  grid->weights_.assign(grid->node_count_, 0.0);

  auto axis_weight = [&](int axis, int i) {
    const int n = grid->cells_[axis];
    const double h = grid->spacing_[axis];
    return (i == 0 || i == n) ? 0.5 * h : h;
  };

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t node = grid->index(i, j);
      bool boundary = (i == 0 || i == nx - 1);
      double w = axis_weight(0, i);
      if (dim == 2) {
        boundary = boundary || j == 0 || j == ny - 1;
        w *= axis_weight(1, j);
      }
      grid->weights_[node] = w;
      if (boundary) {
        grid->boundary_flag_[node] = 1;
        grid->boundary_.push_back(node);
      } else {
        grid->interior_slot_[node] = static_cast<long>(grid->interior_.size());
        grid->interior_.push_back(node);
      }
    }
  }
  return grid;
}

std::array<double, 2> Grid::coord(std::size_t node) const {
  const auto [i, j] = ij(node);
  return {i * spacing_[0], dim_ == 2 ? j * spacing_[1] : 0.0};
}

double Grid::cell_measure() const noexcept {
  return dim_ == 2 ? spacing_[0] * spacing_[1] : spacing_[0];
}

double Grid::measure() const noexcept {
  return dim_ == 2 ? lengths_[0] * lengths_[1] : lengths_[0];
}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) {
    throw ValidationError("scalar field needs a grid");
  }
  if (values_.size() != grid_->node_count()) {
    throw ValidationError("scalar field length does not match grid node count");
  }
  require_finite(values_);
}

ScalarField ScalarField::constant(GridPtr grid, double value) {
  const std::size_t n = grid->node_count();
  return ScalarField(std::move(grid), std::vector<double>(n, value));
}

ScalarField ScalarField::from_function(GridPtr grid,
                                       const std::function<double(double, double)>& f) {
  std::vector<double> v(grid->node_count());
  for (std::size_t n = 0; n < v.size(); ++n) {
    const auto [x, y] = grid->coord(n);
    v[n] = f(x, y);
  }
  return ScalarField(std::move(grid), std::move(v));
}

double ScalarField::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::min() const noexcept {
  return *std::min_element(values_.begin(), values_.end());
}

double ScalarField::max() const noexcept {
  return *std::max_element(values_.begin(), values_.end());
}

double ScalarField::boundary_max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (auto node : grid_->boundary_nodes()) m = std::max(m, values_[node]);
  return m;
}

void laplacian_into(const Grid& grid, std::span<const double> f, std::span<double> out) {
  const double hx2 = grid.spacing(0) * grid.spacing(0);
  if (grid.dim() == 1) {
    for (auto node : grid.interior_nodes()) {
      out[node] = (f[node - 1] - 2.0 * f[node] + f[node + 1]) / hx2;
    }
    return;
  }
  const double hy2 = grid.spacing(1) * grid.spacing(1);
  const auto nx = static_cast<std::size_t>(grid.nodes_along(0));
  for (auto node : grid.interior_nodes()) {
    out[node] = (f[node - 1] - 2.0 * f[node] + f[node + 1]) / hx2 +
                (f[node - nx] - 2.0 * f[node] + f[node + nx]) / hy2;
  }
}

ScalarField apply_laplacian(const ScalarField& f) {
  std::vector<double> out(f.size(), 0.0);
  laplacian_into(f.grid(), f.values(), out);
  return ScalarField(f.grid_ptr(), std::move(out));
}

double integrate(const Grid& grid, std::span<const double> f) {
  double sum = 0.0;
  for (std::size_t n = 0; n < grid.node_count(); ++n) sum += grid.quadrature_weight(n) * f[n];
  return sum;
}

double integrate(const ScalarField& f) { return integrate(f.grid(), f.values()); }

namespace {

// Visits every grid edge as (node_a, node_b, axis, weight) where weight is the
// quadrature weight of the edge (spacing along the edge times the transverse
// trapezoidal weight).
template <typename Visit>
void for_each_edge(const Grid& grid, Visit&& visit) {
  const int nx = grid.nodes_along(0);
  const int ny = grid.nodes_along(1);
  const double hx = grid.spacing(0);
  if (grid.dim() == 1) {
    for (int i = 0; i + 1 < nx; ++i) visit(grid.index(i), grid.index(i + 1), 0, hx);
    return;
  }
  const double hy = grid.spacing(1);
  for (int j = 0; j < ny; ++j) {
    const double wy = (j == 0 || j == ny - 1) ? 0.5 * hy : hy;
    for (int i = 0; i + 1 < nx; ++i) visit(grid.index(i, j), grid.index(i + 1, j), 0, hx * wy);
  }
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double wx = (i == 0 || i == nx - 1) ? 0.5 * hx : hx;
      visit(grid.index(i, j), grid.index(i, j + 1), 1, hy * wx);
    }
  }
}

}  // namespace

double dirichlet_energy(const Grid& grid, std::span<const double> f) {
  double sum = 0.0;
  for_each_edge(grid, [&](std::size_t a, std::size_t b, int axis, double w) {
    const double d = (f[b] - f[a]) / grid.spacing(axis);
    sum += w * d * d;
  });
  return 0.5 * sum;
}

double dirichlet_energy(const ScalarField& f) { return dirichlet_energy(f.grid(), f.values()); }

double weighted_gradient_integral(const Grid& grid, std::span<const double> a,
                                  std::span<const double> f) {
  double sum = 0.0;
  for_each_edge(grid, [&](std::size_t p, std::size_t q, int axis, double w) {
    const double d = (f[q] - f[p]) / grid.spacing(axis);
    sum += w * 0.5 * (a[p] + a[q]) * d * d;
  });
  return sum;
}

}  // namespace facetflow

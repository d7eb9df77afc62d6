#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace facetflow {

/// Uniform tensor grid over (0,L1) or (0,L1)x(0,L2).
///
/// Nodes are numbered x-fastest: node (i,j) has index j*(cells[0]+1)+i.
/// Every node is either interior or on the boundary, never both.
class Grid {
 public:
  int dim() const noexcept { return dim_; }
  double length(int axis) const { return lengths_[axis]; }
  int cells(int axis) const { return cells_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  int nodes_along(int axis) const { return axis < dim_ ? cells_[axis] + 1 : 1; }
  std::size_t node_count() const noexcept { return node_count_; }

  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nodes_along(0)) +
           static_cast<std::size_t>(i);
  }
  /// Inverse of index(): returns {i, j}.
  std::array<int, 2> ij(std::size_t node) const {
    const auto nx = static_cast<std::size_t>(nodes_along(0));
    return {static_cast<int>(node % nx), static_cast<int>(node / nx)};
  }
  std::array<double, 2> coord(std::size_t node) const;

  bool is_boundary(std::size_t node) const { return boundary_flag_[node] != 0; }
  const std::vector<std::size_t>& boundary_nodes() const noexcept { return boundary_; }
  const std::vector<std::size_t>& interior_nodes() const noexcept { return interior_; }

  /// Position of `node` in interior_nodes(), or -1 for boundary nodes.
  long interior_slot(std::size_t node) const { return interior_slot_[node]; }

  /// Trapezoidal (tensor-product) weight of a node; weights sum to |Omega|.
  double quadrature_weight(std::size_t node) const { return weights_[node]; }
  std::span<const double> quadrature_weights() const noexcept { return weights_; }

  /// Product of spacings (the cell measure h^d).
  double cell_measure() const noexcept;

  double measure() const noexcept;

  bool operator==(const Grid& other) const noexcept {
    return dim_ == other.dim_ && lengths_ == other.lengths_ && cells_ == other.cells_;
  }

 private:
  friend std::shared_ptr<const Grid> build_grid(int, std::span<const double>, std::span<const int>);
  Grid() = default;

  int dim_ = 1;
  std::array<double, 2> lengths_{1.0, 1.0};
  std::array<int, 2> cells_{1, 1};
  std::array<double, 2> spacing_{1.0, 1.0};
  std::size_t node_count_ = 0;
  std::vector<unsigned char> boundary_flag_;
  std::vector<std::size_t> boundary_;
  std::vector<std::size_t> interior_;
  std::vector<long> interior_slot_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds a uniform grid. Throws ValidationError for dim outside {1,2},
/// nonpositive lengths or fewer than 2 cells along an axis.
GridPtr build_grid(int dim, std::span<const double> lengths, std::span<const int> cells);

inline GridPtr build_grid_1d(double length, int cells) {
  const std::array<double, 1> l{length};
  const std::array<int, 1> c{cells};
  return build_grid(1, l, c);
}

inline GridPtr build_grid_2d(double lx, double ly, int cx, int cy) {
  const std::array<double, 2> l{lx, ly};
  const std::array<int, 2> c{cx, cy};
  return build_grid(2, l, c);
}

/// Nodal values of a scalar function. All values are finite.
class ScalarField {
 public:
  ScalarField(GridPtr grid, std::vector<double> values);

  static ScalarField constant(GridPtr grid, double value);
  static ScalarField from_function(GridPtr grid, const std::function<double(double, double)>& f);

  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }
  double operator[](std::size_t node) const { return values_[node]; }
  std::size_t size() const noexcept { return values_.size(); }

  double max_abs() const noexcept;
  double min() const noexcept;
  double max() const noexcept;

  /// Maximum of values over boundary nodes.
  double boundary_max() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Second-order central Laplacian (3-point in 1D, 5-point in 2D) at interior
/// nodes. Boundary entries are unset and reported as 0.
ScalarField apply_laplacian(const ScalarField& f);

/// Raw-span variant used by the solvers; writes interior entries only.
void laplacian_into(const Grid& grid, std::span<const double> f, std::span<double> out);

/// Trapezoidal quadrature over the domain.
double integrate(const ScalarField& f);
double integrate(const Grid& grid, std::span<const double> f);

/// E(f) = 1/2 * integral |grad f|^2 with edge difference quotients, each edge
/// weighted by its length along the difference axis times the transverse
/// trapezoidal weight.
double dirichlet_energy(const ScalarField& f);
double dirichlet_energy(const Grid& grid, std::span<const double> f);

/// Integral of a(x)|grad f|^2 using the same edge quadrature as
/// dirichlet_energy; the edge coefficient is the mean of the nodal values of a.
double weighted_gradient_integral(const Grid& grid, std::span<const double> a,
                                  std::span<const double> f);

}  // namespace facetflow

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "facetflow/grid.hpp"

namespace facetflow {

/// Discrete -div(a grad .) + c on the interior nodes of a grid, with Dirichlet
/// values eliminated into the right-hand side.
///
/// Coefficients live on grid edges. x-edges join (i,j)-(i+1,j) and are indexed
/// j*cells_x + i; y-edges join (i,j)-(i,j+1) and are indexed j*(cells_x+1) + i.
class EllipticOperator {
 public:
  /// Edge coefficients are the arithmetic mean of the two nodal values of a.
  /// Throws ValidationError unless a > 0 at every node and c >= 0.
  static EllipticOperator from_nodal(const ScalarField& a, double reaction);

  /// Explicit edge coefficients (all must be positive and finite).
  static EllipticOperator from_edges(GridPtr grid, std::vector<double> edge_x,
                                     std::vector<double> edge_y, double reaction);

  /// -Laplacian (a = 1, c = 0).
  static EllipticOperator laplace(GridPtr grid);

  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  double reaction() const noexcept { return reaction_; }
  std::span<const double> edge_x() const noexcept { return edge_x_; }
  std::span<const double> edge_y() const noexcept { return edge_y_; }

  /// Applies the full stencil at interior nodes of `u` (all nodes read,
  /// interior entries of `out` written).
  void apply(std::span<const double> u, std::span<double> out) const;

  /// Diagonal of the interior system, in interior-slot order.
  std::vector<double> diagonal() const;

  /// Dense interior matrix (row-major, interior-slot order). Test helper; the
  /// solvers never assemble it.
  std::vector<double> dense_interior_matrix() const;

 private:
  EllipticOperator(GridPtr grid, std::vector<double> ex, std::vector<double> ey, double c);

  GridPtr grid_;
  std::vector<double> edge_x_;
  std::vector<double> edge_y_;
  double reaction_ = 0.0;
};

enum class LinearMethod { automatic, banded, conjugate_gradient };

struct LinearSolveConfig {
  /// automatic: banded elimination in 1D, conjugate gradient in 2D.
  LinearMethod method = LinearMethod::automatic;
  double cg_rel_tol = 1e-12;
  /// 0 means 10 * unknown count.
  std::size_t cg_max_iter = 0;
  bool jacobi_preconditioner = false;

  void validate() const;
};

struct EllipticSolution {
  ScalarField u;
  /// max over interior nodes of |(-div(a grad u) + c u) - rhs|.
  double residual = 0.0;
  /// residual / (|rhs|_inf + |g|_inf + 1).
  double relative_residual = 0.0;
  std::size_t iterations = 0;
};

/// Solves -div(a grad u) + c u = rhs at interior nodes with u = g on the
/// boundary. Only boundary entries of `g` and interior entries of `rhs` are
/// read. Throws SolveError when CG misses its tolerance.
EllipticSolution solve_dirichlet(const EllipticOperator& op, const ScalarField& rhs,
                                 const ScalarField& g, const LinearSolveConfig& cfg = {});

/// -Laplace(u) = rhs with u = g on the boundary.
EllipticSolution solve_poisson(const ScalarField& rhs, const ScalarField& g,
                               const LinearSolveConfig& cfg = {});

}  // namespace facetflow

#pragma once

#include "facetflow/grid.hpp"

namespace facetflow {

/// Boundary and initial data of the height problem on one grid.
///
/// b0 is the Dirichlet height, b1 the boundary value of the Laplacian (only
/// its boundary entries enter the scheme; interior entries carry the floor
/// check), u0 the initial surface. Construction validates:
///   H2: c0 > 0 and b1 >= c0 at every node;
///   H3: Laplacian(u0) >= c0 at every interior node;
///   compatibility: b1 equals the boundary extension of Laplacian(u0) within
///   1e-8 * (1 + |b1|_inf).
class ProblemData {
 public:
  ProblemData(ScalarField b0, ScalarField b1, double c0, ScalarField u0);

  const ScalarField& b0() const noexcept { return b0_; }
  const ScalarField& b1() const noexcept { return b1_; }
  double c0() const noexcept { return c0_; }
  const ScalarField& u0() const noexcept { return u0_; }
  const Grid& grid() const noexcept { return u0_.grid(); }
  const GridPtr& grid_ptr() const noexcept { return u0_.grid_ptr(); }

  /// Applies `passes` rounds of nearest-neighbour averaging (boundary nodes
  /// fixed) to u0, b0 and b1, then re-checks the H2 and H3 floors.
  ProblemData smoothed(int passes) const;

  double compatibility_tolerance() const noexcept;

 private:
  struct Unchecked {};
  ProblemData(ScalarField b0, ScalarField b1, double c0, ScalarField u0, Unchecked);
  void check_floors() const;
  void check_compatibility() const;

  ScalarField b0_;
  ScalarField b1_;
  double c0_;
  ScalarField u0_;
};

/// Discrete Laplacian of f at interior nodes, extended to each boundary node
/// by linear extrapolation from the two nearest interior nodes along the
/// inward direction (a single node when only one exists).
ScalarField laplacian_with_boundary_extension(const ScalarField& f);

/// Same extrapolation for an arbitrary field whose interior values are given.
ScalarField extend_interior_to_boundary(const ScalarField& f);

/// One pass of the averaging stencil v <- v/2 + mean(neighbours)/2 at interior
/// nodes; boundary nodes are left untouched.
ScalarField smooth_once(const ScalarField& f);

}  // namespace facetflow

#include "facetflow/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "facetflow/error.hpp"

namespace facetflow {

namespace {

// Relative slack on the floor comparisons so data that sits exactly on c0
// is not rejected over a rounding error in the discrete Laplacian.
constexpr double kFloorSlack = 1e-12;

}  // namespace

ScalarField extend_interior_to_boundary(const ScalarField& f) {
  const Grid& g = f.grid();
  std::vector<double> out(f.vector());
  const int nx = g.nodes_along(0);
  const int ny = g.nodes_along(1);
  auto clamp_inside = [](int v, int n) { return std::clamp(v, 1, n - 2); };
  for (auto node : g.boundary_nodes()) {
    const auto [i, j] = g.ij(node);
    const int i1 = clamp_inside(i, nx);
    const int j1 = g.dim() == 2 ? clamp_inside(j, ny) : 0;
    const int di = i1 - i;
    const int dj = j1 - j;
    const int i2 = i1 + di;
    const int j2 = j1 + dj;
    const bool second_inside = i2 >= 1 && i2 <= nx - 2 &&
                               (g.dim() == 1 || (j2 >= 1 && j2 <= ny - 2));
    const double v1 = f[g.index(i1, j1)];
    out[node] = second_inside ? 2.0 * v1 - f[g.index(i2, j2)] : v1;
  }
  return ScalarField(f.grid_ptr(), std::move(out));
}

ScalarField laplacian_with_boundary_extension(const ScalarField& f) {
  return extend_interior_to_boundary(apply_laplacian(f));
}

ScalarField smooth_once(const ScalarField& f) {
  const Grid& g = f.grid();
  std::vector<double> out(f.vector());
  const auto nx = static_cast<std::size_t>(g.nodes_along(0));
  for (auto node : g.interior_nodes()) {
    double mean = f[node - 1] + f[node + 1];
    double count = 2.0;
    if (g.dim() == 2) {
      mean += f[node - nx] + f[node + nx];
      count = 4.0;
    }
    out[node] = 0.5 * f[node] + 0.5 * mean / count;
  }
  return ScalarField(f.grid_ptr(), std::move(out));
}

ProblemData::ProblemData(ScalarField b0, ScalarField b1, double c0, ScalarField u0, Unchecked)
    : b0_(std::move(b0)), b1_(std::move(b1)), c0_(c0), u0_(std::move(u0)) {
  if (!(b0_.grid() == u0_.grid()) || !(b1_.grid() == u0_.grid())) {
    throw ValidationError("b0, b1 and u0 must live on the same grid");
  }
}

ProblemData::ProblemData(ScalarField b0, ScalarField b1, double c0, ScalarField u0)
    : ProblemData(std::move(b0), std::move(b1), c0, std::move(u0), Unchecked{}) {
  check_floors();
  check_compatibility();
}

double ProblemData::compatibility_tolerance() const noexcept {
  return 1e-8 * (1.0 + b1_.max_abs());
}

void ProblemData::check_floors() const {
  if (!(c0_ > 0.0) || !std::isfinite(c0_)) {
    std::ostringstream msg;
    msg << "H2 violated: floor c0 must be positive, got " << c0_;
    throw ValidationError(msg.str());
  }
  const double floor = c0_ * (1.0 - kFloorSlack);
  for (std::size_t n = 0; n < b1_.size(); ++n) {
    if (b1_[n] < floor) {
      std::ostringstream msg;
      msg << "H2 floor violated at node " << n << ": b1 = " << b1_[n] << " < c0 = " << c0_;
      throw ValidationError(msg.str());
    }
  }
  const ScalarField lap = apply_laplacian(u0_);
  for (auto node : grid().interior_nodes()) {
    if (lap[node] < floor) {
      std::ostringstream msg;
      msg << "H3 floor violated at node " << node << ": Laplacian(u0) = " << lap[node]
          << " < c0 = " << c0_;
      throw ValidationError(msg.str());
    }
  }
}

void ProblemData::check_compatibility() const {
  const ScalarField ext = laplacian_with_boundary_extension(u0_);
  const double tol = compatibility_tolerance();
  for (auto node : grid().boundary_nodes()) {
    const double gap = std::abs(ext[node] - b1_[node]);
    if (gap > tol) {
      std::ostringstream msg;
      msg << "compatibility b1 = Laplacian(u0) violated at boundary node " << node
          << ": b1 = " << b1_[node] << ", extended Laplacian = " << ext[node] << " (gap " << gap
          << " > " << tol << ")";
      throw ValidationError(msg.str());
    }
  }
}

ProblemData ProblemData::smoothed(int passes) const {
  if (passes < 0) throw ValidationError("smoothing_passes must be nonnegative");
  if (passes == 0) return *this;
  ScalarField b0 = b0_, b1 = b1_, u0 = u0_;
  for (int p = 0; p < passes; ++p) {
    b0 = smooth_once(b0);
    b1 = smooth_once(b1);
    u0 = smooth_once(u0);
  }
  ProblemData out(std::move(b0), std::move(b1), c0_, std::move(u0), Unchecked{});
  out.check_floors();
  return out;
}

}  // namespace facetflow

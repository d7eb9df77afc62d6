#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "facetflow/grid.hpp"
#include "facetflow/stepper.hpp"

namespace facetflow {

/// Per-step series of the a priori functionals. Every vector has one entry per
/// time level k = 0..j. Entries that live on an interval (rates, cumulative
/// integrals) are 0 at k = 0; cumulative series use the rectangle rule that
/// matches the piecewise-constant interpolants.
struct DiagnosticsReport {
  std::vector<double> time;
  /// E(u_k) = 1/2 int |grad u_k|^2.
  std::vector<double> energy;
  /// int (exp(2 psi_k) + exp(-psi_k)).
  std::vector<double> mass_like;
  /// sum_{i<=k} tau int (Laplace_h exp(3 psi_i))^2, with the boundary value of
  /// Laplace_h exp(3 psi) taken as tau psi_i (the flux equation with u fixed).
  std::vector<double> cum_laplace_rho3_sq;
  /// tau * sum_{i<=k} tau int exp(3 psi_i) |grad psi_i|^2.
  std::vector<double> cum_weighted_flux;
  /// int |grad u_k|^2.
  std::vector<double> grad_u_sq;
  /// sum_{i<=k} tau int |grad exp(psi_i)|^2.
  std::vector<double> cum_grad_rho_sq;
  /// -tau sum_{i<=k} tau int_{psi_i <= 0} psi_i exp(-psi_i) (nonnegative).
  std::vector<double> cum_negative_psi;
  /// int ((u_k - u_{k-1}) / tau)^2.
  std::vector<double> du_dt_sq;
  /// sum_{i<=k} tau int ((rho_i - rho_{i-1}) / tau)^2.
  std::vector<double> cum_drho_dt_sq;
  std::vector<double> min_rho;
  /// min over interior nodes of Laplace_h u_k.
  std::vector<double> min_laplacian_u;
  /// max u_k - max over boundary nodes of b0.
  std::vector<double> max_u_over_b0;
  /// Box constants (M, L) and margin min(psi + M, L - psi); zero at k = 0.
  std::vector<double> box_lower;
  std::vector<double> box_upper;
  std::vector<double> box_margin;
  std::vector<double> residual;

  /// Column names and rows in a fixed order, for serialization.
  static const std::vector<std::string>& column_names();
  std::vector<double> row(std::size_t k) const;
  std::size_t size() const noexcept { return time.size(); }
};

DiagnosticsReport apriori_report(const Trajectory& traj);

/// Uniform-in-j quantities: max over steps of the pointwise series and final
/// values of the cumulative ones.
struct AprioriSummary {
  double max_mass_like = 0.0;
  double laplace_rho3_sq = 0.0;
  double weighted_flux = 0.0;
  double max_grad_u_sq = 0.0;
  double grad_rho_sq = 0.0;
  double negative_psi = 0.0;
  double max_du_dt_sq = 0.0;
  double drho_dt_sq = 0.0;

  static const std::vector<std::string>& names();
  std::vector<double> values() const;
};

AprioriSummary summarize(const DiagnosticsReport& report);

/// Test function xi(x, y, t) with analytic gradient and Laplacian.
struct TestFunction {
  std::string name;
  std::function<double(double, double, double)> value;
  std::function<std::array<double, 2>(double, double, double)> gradient;
  std::function<double(double, double, double)> laplacian;
  bool vanishes_on_lateral_boundary = true;
  bool nonnegative = true;
};

TestFunction zero_test_function();
/// prod over axes of x(L - x) / L^2; x(1 - x) on the unit interval.
TestFunction polynomial_bubble(const Grid& grid);
/// prod over axes of sin^2(pi x / L).
TestFunction sine_squared_bubble(const Grid& grid);
/// prod over axes of sin(pi x / L) times cos(pi t): vanishes on the boundary,
/// changes sign in time.
TestFunction signed_sine(const Grid& grid);
TestFunction scaled(const TestFunction& xi, double factor);
TestFunction sum(const TestFunction& a, const TestFunction& b);

/// Looks up "zero", "bubble", "sin2" or "signed_sine"; throws ValidationError
/// for other names.
TestFunction test_function_by_name(const std::string& name, const Grid& grid);

enum class WeakMode { equality, inequality };

struct WeakResidual {
  /// int_0^T int ( d_t rho~ rho_bar + (Lap rho_bar^3)^2 ) xi
  ///   + 2 int_0^T int Lap rho_bar^3 grad rho_bar^3 . grad xi
  ///   + int_0^T int rho_bar^3 Lap rho_bar^3 Lap xi
  double value = 0.0;
  std::array<double, 4> terms{};
  /// C_disc (tau + h^2) |xi|_{W^{2,inf}} S, with S built from the trajectory
  /// (see weak_residual_scale); 0 in equality mode.
  double tol_slack = 0.0;
  double scale = 0.0;
};

/// Constant multiplying (tau + h^2) in tol_slack. Measured |value - limit| /
/// ((tau + h^2) |xi| S) stays below 5e-4 on the generic runs.
inline constexpr double kWeakResidualDiscConstant = 1e-2;

/// S = max_k ( |w_k|_inf + |grad_h w_k|_inf + |Lap_h w_k|_inf )^2
///     + int_0^T int (d_t rho~)^2, where w_k = rho_k^3.
double weak_residual_scale(const Trajectory& traj);

/// Throws ValidationError when xi is nonzero on boundary nodes at a sampled
/// time, or, in inequality mode, negative at a sampled node and time.
WeakResidual weak_residual(const Trajectory& traj, const TestFunction& xi, WeakMode mode);

struct HolderSample {
  double x = 0.0;
  double t = 0.0;
  double f = 0.0;
};

/// sup over pairs of |f1 - f2| / (|x1 - x2|^alpha_x + |t1 - t2|^alpha_t).
/// Throws ValidationError for fewer than 2 samples or a repeated point with
/// differing values.
double holder_modulus(const std::vector<HolderSample>& samples, double alpha_x = 0.5,
                      double alpha_t = 0.25);

/// Samples of the cubic interpolant c~ of a 1D trajectory at every node and
/// at `per_interval` equally spaced instants in each (t_{k-1}, t_k], plus t = 0.
std::vector<HolderSample> cubic_interpolant_samples(const Trajectory& traj,
                                                    std::size_t per_interval = 1);

/// |d_t c~|_{L^2(Omega_T)} + max_k |rho_k^3|_{W^{2,2}}, the quantities the
/// Hoelder constant depends on.
double holder_reference_norm(const Trajectory& traj);

/// Ratio holder_modulus / holder_reference_norm may not exceed this constant.
/// The ratio measured 0.064 to 0.097 over the generic runs (8 to 64 cells,
/// j 8 to 64); the small runs agree with the brute-force modulus.
inline constexpr double kHolderConstant = 0.2;

struct IntervalGap {
  std::size_t k = 0;
  /// max over sampled t in the interval of int (u~ - u_bar)^2.
  double u_gap_lhs = 0.0;
  /// tau^2 int (d_t u~)^2 on the interval.
  double u_gap_rhs = 0.0;
  /// max over samples of |lhs(t) - ((t_k - t)/tau)^2 rhs|, the exact identity.
  double u_gap_identity_defect = 0.0;
};

struct GapReport {
  std::vector<IntervalGap> intervals;
  /// int_0^T int (rho~ - rho_bar)^2 by 2-point Gauss in time (exact here).
  double rho_gap_lhs = 0.0;
  /// tau^2 int_0^T int (d_t rho~)^2.
  double rho_gap_rhs = 0.0;
  /// |rho_gap_lhs - rho_gap_rhs / 3|: the left side equals one third of the right.
  double rho_gap_identity_defect = 0.0;
  /// sup_t |c~ - rho_bar^3|_inf = max_k |rho_k^3 - rho_{k-1}^3|_inf.
  double cubic_gap = 0.0;
  /// kHolderConstant * holder_reference_norm * tau^(1/4) (1D only, else 0).
  double cubic_bound = 0.0;
  /// Absolute allowance for rounding in the interpolant blends.
  double round_off_floor = 0.0;
  bool u_gap_holds(double rel_tol = 1e-12) const;
  bool rho_gap_holds(double rel_tol = 1e-12) const;
};

GapReport interpolant_gap_report(const Trajectory& traj);

}  // namespace facetflow

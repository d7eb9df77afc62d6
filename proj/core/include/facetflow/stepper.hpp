#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "facetflow/elliptic.hpp"
#include "facetflow/grid.hpp"
#include "facetflow/problem.hpp"

namespace facetflow {

struct StepperConfig {
  /// Time step; run_rothe overrides it with T/j.
  double tau = 0.01;
  /// Mixing weight of the damped fixed-point update, in (0,1].
  double omega = 0.5;
  /// Tolerance on the residual of the coupled step system.
  double fp_tol = 1e-10;
  std::size_t fp_max_iter = 200;
  /// 1: solve at sigma = 1 directly (continuation only as fallback).
  /// S > 1: march sigma through 1/S, 2/S, ..., 1.
  int homotopy_stages = 1;
  int smoothing_passes = 0;
  /// Anderson history length for the fixed-point iteration; 0 gives plain
  /// damped iteration.
  int anderson_depth = 8;
  LinearSolveConfig linear;

  void validate() const;
};

/// Converged solution (u_k, psi_k, rho_k = exp(psi_k)) of one time step.
struct StepState {
  std::size_t k = 0;
  ScalarField u;
  ScalarField psi;
  ScalarField rho;
  /// max of the two residual norms of the step system.
  double residual = 0.0;
  std::size_t iters = 0;
  /// Number of sigma stages used (1 when no continuation was needed).
  int stages_used = 1;
  double wall_seconds = 0.0;
};

struct Trajectory {
  ProblemData data;
  double tau = 0.0;
  std::vector<StepState> states;

  std::size_t steps() const noexcept { return states.empty() ? 0 : states.size() - 1; }
  double final_time() const noexcept { return tau * static_cast<double>(steps()); }
  double time(std::size_t k) const noexcept { return tau * static_cast<double>(k); }
  const Grid& grid() const noexcept { return data.grid(); }
};

/// Image of the fixed-point map: the Poisson solve for u followed by the
/// reaction-diffusion solve for psi.
struct PicardImage {
  ScalarField u;
  ScalarField psi;
  double poisson_residual = 0.0;
  double psi_residual = 0.0;
};

/// One application of sigma * B at g:
///   -Laplace(u) = -exp(-g), u = b0 on the boundary;
///   -div(A(g) grad psi) + tau psi = -sigma (u - u_prev) / tau,
///   psi = -sigma ln b1 on the boundary,
/// where A(g) on the edge (p,q) is (exp(3 g_q) - exp(3 g_p)) / (g_q - g_p),
/// the divided difference of exp(3 s) (equal to 3 exp(3 g) when g_p = g_q).
/// At a fixed point the discrete flux term is exactly Laplace_h exp(3 psi).
/// Throws SolveError if 3 max(g) exceeds ln(DBL_MAX)/2.
PicardImage picard_map(const ScalarField& g, const ScalarField& u_prev, const ProblemData& data,
                       double tau, double sigma, const LinearSolveConfig& linear = {});

/// Residual norms of the sigma-scaled step system at interior nodes:
///   flux:      sigma (u - u_prev)/tau - Laplace_h exp(3 psi) + tau psi
///   curvature: Laplace_h u - exp(-psi)
struct StepResidual {
  double flux = 0.0;
  double curvature = 0.0;
  double max() const noexcept { return flux > curvature ? flux : curvature; }
};

StepResidual step_residual(const ScalarField& u, const ScalarField& psi,
                           const ScalarField& u_prev, double tau, double sigma = 1.0);

/// Sub/supersolution constants bounding psi:
///   M = max{ (|u_prev|_inf + |b0|_inf) / tau^2, (ln |b1|_inf)^+ }
///   L = max{ |u - u_prev|_inf / tau^2,           (ln c0)^- }
struct PsiBox {
  double lower_magnitude = 0.0;  // M, so psi >= -M
  double upper = 0.0;            // L, so psi <= L
  /// -M - slack <= psi <= L + slack at every node. The constants bound the
  /// exact discrete solution; `slack` absorbs the solve tolerance (with
  /// steady data L = 0 and the computed psi is zero only to round-off).
  bool contains(const ScalarField& psi, double slack = 0.0) const;
  /// min over nodes of min(psi + M, L - psi).
  double margin(const ScalarField& psi) const;
};

PsiBox psi_box_bounds(const ProblemData& data, const ScalarField& u_prev,
                      const ScalarField& u_computed, double tau);

/// Solves the coupled step system for (u_k, psi_k) given u_{k-1}. The
/// iteration starts at `psi_start` (typically psi_{k-1}); without one it
/// starts from -ln Laplace_h(u_prev) where that is positive. Convergence is
/// declared on step_residual, never on iterate differences. Throws SolveError
/// carrying the residual history when neither the direct attempt nor the
/// sigma continuation converges.
StepState solve_step(const ScalarField& u_prev, const ProblemData& data, const StepperConfig& cfg,
                     const std::optional<ScalarField>& psi_start = std::nullopt,
                     std::size_t k = 1);

/// State 0 built from the data: u = u0, psi = -ln Laplace_h(u0) inside and
/// -ln b1 on the boundary.
StepState initial_state(const ProblemData& data);

/// Rothe march over [0,T] with j equal steps (tau = T/j). The data are first
/// smoothed with cfg.smoothing_passes passes. Step failures are rethrown as
/// SolveError naming the step index.
Trajectory run_rothe(const ProblemData& data, double T, std::size_t j, const StepperConfig& cfg);

/// Time interpolants of a trajectory at a single instant.
struct Interpolants {
  /// k such that t lies in (t_{k-1}, t_k]; 0 only for t = 0.
  std::size_t interval = 0;
  ScalarField u_tilde;     // piecewise linear in t
  ScalarField u_bar;       // piecewise constant (right end value)
  ScalarField psi_bar;
  ScalarField rho_tilde;   // piecewise linear in t of exp(psi_k)
  ScalarField rho_bar;
  ScalarField rho3_tilde;  // piecewise linear in t of rho_k^3
  ScalarField du_dt;       // (u_k - u_{k-1}) / tau on the interval
  ScalarField drho_dt;     // (rho_k - rho_{k-1}) / tau on the interval
};

/// Throws ValidationError for t outside [0, T].
Interpolants eval_interpolants(const Trajectory& traj, double t);

}  // namespace facetflow

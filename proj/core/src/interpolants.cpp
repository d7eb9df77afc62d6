#include <algorithm>
#include <cmath>
#include <sstream>

#include "facetflow/error.hpp"
#include "facetflow/stepper.hpp"

namespace facetflow {

namespace {

ScalarField blend(const ScalarField& right, const ScalarField& left, double lambda) {
  std::vector<double> v(right.size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = lambda * right[n] + (1.0 - lambda) * left[n];
  return ScalarField(right.grid_ptr(), std::move(v));
}

ScalarField difference_quotient(const ScalarField& right, const ScalarField& left, double tau) {
  std::vector<double> v(right.size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = (right[n] - left[n]) / tau;
  return ScalarField(right.grid_ptr(), std::move(v));
}

ScalarField cube(const ScalarField& f) {
  std::vector<double> v(f.size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = f[n] * f[n] * f[n];
  return ScalarField(f.grid_ptr(), std::move(v));
}

}  // namespace

Interpolants eval_interpolants(const Trajectory& traj, double t) {
  const double T = traj.final_time();
  const double slack = 1e-12 * (T > 0.0 ? T : 1.0);
  if (traj.states.empty() || !(t >= -slack) || !(t <= T + slack)) {
    std::ostringstream msg;
    msg << "interpolant time " << t << " outside [0, " << T << "]";
    throw ValidationError(msg.str());
  }
  const double tau = traj.tau;
  const std::size_t j = traj.steps();

  if (t <= slack || j == 0) {
    const StepState& s0 = traj.states.front();
    const StepState& s1 = j > 0 ? traj.states[1] : s0;
    const double dt = j > 0 ? tau : 1.0;
    return Interpolants{0,       s0.u,   s0.u,     s0.psi,
                        s0.rho,  s0.rho, cube(s0.rho), difference_quotient(s1.u, s0.u, dt),
                        difference_quotient(s1.rho, s0.rho, dt)};
  }

  // Interval (t_{k-1}, t_k] containing t; a t within rounding of t_k maps to k.
  auto k = static_cast<std::size_t>(std::ceil(t / tau - 1e-9));
  if (k < 1) k = 1;
  if (k > j) k = j;
  const double lambda = std::clamp((t - traj.time(k - 1)) / tau, 0.0, 1.0);
  const StepState& right = traj.states[k];
  const StepState& left = traj.states[k - 1];
  const ScalarField right3 = cube(right.rho);
  const ScalarField left3 = cube(left.rho);
  return Interpolants{k,
                      blend(right.u, left.u, lambda),
                      right.u,
                      right.psi,
                      blend(right.rho, left.rho, lambda),
                      right.rho,
                      blend(right3, left3, lambda),
                      difference_quotient(right.u, left.u, tau),
                      difference_quotient(right.rho, left.rho, tau)};
}

}  // namespace facetflow

#include "facetflow/stepper.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "facetflow/error.hpp"

namespace facetflow {

namespace {

// exp(3 g) must stay below sqrt(DBL_MAX).
const double kOverflowLimit = 0.5 * std::log(std::numeric_limits<double>::max());
// Clamp used during iteration never lets 3|psi| reach kOverflowLimit.
constexpr double kPsiGuardCap = 100.0;
constexpr int kFallbackStages = 4;
constexpr double kMinDamping = 1e-6;

double sinhc(double z) {
  if (std::abs(z) < 1e-4) return 1.0 + z * z / 6.0;
  return std::sinh(z) / z;
}

// Divided difference of exp(3 s) between a and b.
double exp3_divided_difference(double a, double b) {
  const double mid = 0.5 * (a + b);
  return 3.0 * std::exp(3.0 * mid) * sinhc(1.5 * (b - a));
}

double inf_norm(const ScalarField& f) { return f.max_abs(); }

double positive_part(double v) { return v > 0.0 ? v : 0.0; }
double negative_part(double v) { return v < 0.0 ? -v : 0.0; }

std::vector<double> boundary_psi(const ProblemData& data, double sigma) {
  std::vector<double> out(data.grid().node_count(), 0.0);
  for (auto node : data.grid().boundary_nodes()) out[node] = -sigma * std::log(data.b1()[node]);
  return out;
}

}  // namespace

void StepperConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be positive");
  if (!(omega > 0.0 && omega <= 1.0)) throw ValidationError("omega must lie in (0,1]");
  if (!(fp_tol > 0.0)) throw ValidationError("fp_tol must be positive");
  if (fp_max_iter == 0) throw ValidationError("fp_max_iter must be positive");
  if (homotopy_stages < 1) throw ValidationError("homotopy_stages must be at least 1");
  if (smoothing_passes < 0) throw ValidationError("smoothing_passes must be nonnegative");
  if (anderson_depth < 0) throw ValidationError("anderson_depth must be nonnegative");
  linear.validate();
}

PicardImage picard_map(const ScalarField& g, const ScalarField& u_prev, const ProblemData& data,
                       double tau, double sigma, const LinearSolveConfig& linear) {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw ValidationError("sigma must lie in (0,1]");
  if (!(tau > 0.0)) throw ValidationError("tau must be positive");
  const Grid& grid = data.grid();
  if (!(g.grid() == grid) || !(u_prev.grid() == grid)) {
    throw ValidationError("fixed-point map inputs use different grids");
  }
  if (3.0 * g.max() > kOverflowLimit) {
    throw SolveError("fixed-point iterate would overflow exp(3 psi)", 3.0 * g.max());
  }
  const GridPtr& gp = data.grid_ptr();

  std::vector<double> poisson_rhs(grid.node_count(), 0.0);
  for (std::size_t n = 0; n < poisson_rhs.size(); ++n) poisson_rhs[n] = -std::exp(-g[n]);
  EllipticSolution u = solve_poisson(ScalarField(gp, std::move(poisson_rhs)), data.b0(), linear);

  const int nx = grid.nodes_along(0);
  const int ny = grid.nodes_along(1);
  std::vector<double> ex(static_cast<std::size_t>(grid.cells(0)) * ny);
  std::vector<double> ey;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      ex[static_cast<std::size_t>(j) * grid.cells(0) + i] =
          exp3_divided_difference(g[grid.index(i, j)], g[grid.index(i + 1, j)]);
    }
  }
  if (grid.dim() == 2) {
    ey.resize(static_cast<std::size_t>(nx) * grid.cells(1));
    for (int j = 0; j + 1 < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        ey[static_cast<std::size_t>(j) * nx + i] =
            exp3_divided_difference(g[grid.index(i, j)], g[grid.index(i, j + 1)]);
      }
    }
  }
  const EllipticOperator op = EllipticOperator::from_edges(gp, std::move(ex), std::move(ey), tau);

  std::vector<double> rhs(grid.node_count(), 0.0);
  for (auto node : grid.interior_nodes()) rhs[node] = -sigma * (u.u[node] - u_prev[node]) / tau;
  EllipticSolution psi = solve_dirichlet(op, ScalarField(gp, std::move(rhs)),
                                         ScalarField(gp, boundary_psi(data, sigma)), linear);

  return PicardImage{std::move(u.u), std::move(psi.u), u.residual, psi.residual};
}

StepResidual step_residual(const ScalarField& u, const ScalarField& psi,
                           const ScalarField& u_prev, double tau, double sigma) {
  const Grid& grid = u.grid();
  std::vector<double> e3(grid.node_count());
  for (std::size_t n = 0; n < e3.size(); ++n) e3[n] = std::exp(3.0 * psi[n]);
  std::vector<double> lap_e3(grid.node_count(), 0.0);
  std::vector<double> lap_u(grid.node_count(), 0.0);
  laplacian_into(grid, e3, lap_e3);
  laplacian_into(grid, u.values(), lap_u);
  StepResidual r;
  for (auto node : grid.interior_nodes()) {
    const double flux = sigma * (u[node] - u_prev[node]) / tau - lap_e3[node] + tau * psi[node];
    const double curv = lap_u[node] - std::exp(-psi[node]);
    r.flux = std::max(r.flux, std::abs(flux));
    r.curvature = std::max(r.curvature, std::abs(curv));
  }
  if (!std::isfinite(r.flux) || !std::isfinite(r.curvature)) {
    r.flux = std::numeric_limits<double>::infinity();
  }
  return r;
}

bool PsiBox::contains(const ScalarField& psi, double slack) const {
  return psi.min() >= -lower_magnitude - slack && psi.max() <= upper + slack;
}

double PsiBox::margin(const ScalarField& psi) const {
  return std::min(psi.min() + lower_magnitude, upper - psi.max());
}

PsiBox psi_box_bounds(const ProblemData& data, const ScalarField& u_prev,
                      const ScalarField& u_computed, double tau) {
  if (!(tau > 0.0)) throw ValidationError("tau must be positive");
  const double tau2 = tau * tau;
  std::vector<double> diff(u_prev.size());
  for (std::size_t n = 0; n < diff.size(); ++n) diff[n] = u_computed[n] - u_prev[n];
  double diff_norm = 0.0;
  for (double d : diff) diff_norm = std::max(diff_norm, std::abs(d));
  PsiBox box;
  box.lower_magnitude = std::max((inf_norm(u_prev) + inf_norm(data.b0())) / tau2,
                                 positive_part(std::log(inf_norm(data.b1()))));
  box.upper = std::max(diff_norm / tau2, negative_part(std::log(data.c0())));
  return box;
}

StepState initial_state(const ProblemData& data) {
  const Grid& grid = data.grid();
  const ScalarField lap = apply_laplacian(data.u0());
  std::vector<double> psi(grid.node_count());
  for (auto node : grid.interior_nodes()) psi[node] = -std::log(lap[node]);
  for (auto node : grid.boundary_nodes()) psi[node] = -std::log(data.b1()[node]);
  std::vector<double> rho(psi.size());
  for (std::size_t n = 0; n < rho.size(); ++n) rho[n] = std::exp(psi[n]);
  StepState s{0,
              data.u0(),
              ScalarField(data.grid_ptr(), std::move(psi)),
              ScalarField(data.grid_ptr(), std::move(rho)),
              0.0,
              0,
              1,
              0.0};
  return s;
}

namespace {

struct StageResult {
  bool converged = false;
  std::vector<double> x;  // interior psi
  std::optional<ScalarField> u;
  double residual = std::numeric_limits<double>::infinity();
  std::size_t iters = 0;
};

class StepSolver {
 public:
  StepSolver(const ScalarField& u_prev, const ProblemData& data, const StepperConfig& cfg)
      : u_prev_(u_prev), data_(data), cfg_(cfg), grid_(data.grid()) {
    const double tau2 = cfg.tau * cfg.tau;
    const double b0 = data.b0().max_abs();
    const double up = u_prev.max_abs();
    const double m = std::max((up + b0) / tau2, positive_part(std::log(data.b1().max_abs())));
    const double l = std::max((up + b0) / tau2, negative_part(std::log(data.c0())));
    lower_guard_ = std::min(std::max(2.0 * m, 1.0), kPsiGuardCap);
    upper_guard_ = std::min(std::max(2.0 * l, 1.0), kPsiGuardCap);
  }

  ScalarField full_field(const std::vector<double>& x, double sigma) const {
    std::vector<double> v = boundary_psi(data_, sigma);
    const auto& interior = grid_.interior_nodes();
    for (std::size_t s = 0; s < interior.size(); ++s) v[interior[s]] = x[s];
    return ScalarField(data_.grid_ptr(), std::move(v));
  }

  void clamp(std::vector<double>& x) const {
    for (double& v : x) v = std::clamp(v, -lower_guard_, upper_guard_);
  }

  bool on_guard(const std::vector<double>& x) const {
    for (double v : x) {
      if (v <= -lower_guard_ || v >= upper_guard_) return true;
    }
    return false;
  }

  StageResult converge(std::vector<double> x, double sigma, std::vector<double>& history) const {
    const std::size_t m = x.size();
    const long ml = static_cast<long>(m);
    const int depth = cfg_.anderson_depth;
    StageResult out;
    clamp(x);

    // Safeguard: an evaluation that fails or blows the residual up by more
    // than 10x is rejected; the iteration returns to the last accepted
    // iterate with the Anderson history cleared and half the damping.
    double omega = cfg_.omega;
    bool have_good = false;
    Eigen::VectorXd x_good, f_good;
    double res_good = std::numeric_limits<double>::infinity();
    std::vector<Eigen::VectorXd> dx_hist, df_hist;
    const auto& interior = grid_.interior_nodes();

    for (std::size_t it = 0; it < cfg_.fp_max_iter; ++it) {
      const ScalarField g = full_field(x, sigma);
      std::optional<PicardImage> image;
      double res = std::numeric_limits<double>::infinity();
      try {
        image = picard_map(g, u_prev_, data_, cfg_.tau, sigma, cfg_.linear);
        res = step_residual(image->u, g, u_prev_, cfg_.tau, sigma).max();
      } catch (const SolveError&) {
        image.reset();
      }
      if (image) history.push_back(res);
      if (image && res <= cfg_.fp_tol) {
        out.converged = !on_guard(x);
        out.x = std::move(x);
        out.u = std::move(image->u);
        out.residual = res;
        out.iters = it + 1;
        return out;
      }

      const bool rejected = !image || !std::isfinite(res) || (have_good && res > 10.0 * res_good);
      Eigen::VectorXd next;
      if (rejected) {
        if (!have_good || omega < kMinDamping) {
          out.iters = it + 1;
          return out;
        }
        dx_hist.clear();
        df_hist.clear();
        omega *= 0.5;
        next = x_good + omega * f_good;
      } else {
        const Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), ml);
        Eigen::VectorXd f(ml);
        for (std::size_t s = 0; s < m; ++s) f[static_cast<long>(s)] = image->psi[interior[s]] - x[s];
        if (have_good && depth > 0) {
          dx_hist.push_back(xv - x_good);
          df_hist.push_back(f - f_good);
          if (static_cast<int>(dx_hist.size()) > depth) {
            dx_hist.erase(dx_hist.begin());
            df_hist.erase(df_hist.begin());
          }
        }
        x_good = xv;
        f_good = f;
        res_good = res;
        have_good = true;
        omega = std::min(cfg_.omega, 2.0 * omega);

        next = xv + omega * f;
        if (!df_hist.empty()) {
          const long p = static_cast<long>(df_hist.size());
          Eigen::MatrixXd dF(ml, p), dX(ml, p);
          for (long c = 0; c < p; ++c) {
            dF.col(c) = df_hist[static_cast<std::size_t>(c)];
            dX.col(c) = dx_hist[static_cast<std::size_t>(c)];
          }
          const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dF);
          const Eigen::VectorXd gamma = qr.solve(f);
          const Eigen::VectorXd accelerated = next - (dX + omega * dF) * gamma;
          if (gamma.allFinite() && accelerated.allFinite()) {
            next = accelerated;
          } else {
            dx_hist.clear();
            df_hist.clear();
          }
        }
      }
      if (!next.allFinite()) {
        out.iters = it + 1;
        return out;
      }
      for (std::size_t s = 0; s < m; ++s) x[s] = next[static_cast<long>(s)];
      clamp(x);
    }
    out.iters = cfg_.fp_max_iter;
    return out;
  }

  // Runs sigma = 1/S, ..., 1, each stage warm-started from the previous one.
  StageResult run(const std::vector<double>& start, int stages, std::vector<double>& history,
                  std::size_t& total_iters) const {
    std::vector<double> x = start;
    StageResult res;
    for (int s = 1; s <= stages; ++s) {
      const double sigma = static_cast<double>(s) / stages;
      res = converge(x, sigma, history);
      total_iters += res.iters;
      if (!res.converged) return res;
      x = res.x;
    }
    return res;
  }

 private:
  const ScalarField& u_prev_;
  const ProblemData& data_;
  const StepperConfig& cfg_;
  const Grid& grid_;
  double lower_guard_ = 1.0;
  double upper_guard_ = 1.0;
};

// Residual of the unchanged state when it already meets fp_tol.
std::optional<double> previous_state_residual(const ScalarField& u_prev, const ProblemData& data,
                                              const ScalarField& psi, const StepperConfig& cfg) {
  for (auto node : data.grid().boundary_nodes()) {
    if (u_prev[node] != data.b0()[node]) return std::nullopt;
  }
  const double r = step_residual(u_prev, psi, u_prev, cfg.tau, 1.0).max();
  if (r <= cfg.fp_tol) return r;
  return std::nullopt;
}

}  // namespace

StepState solve_step(const ScalarField& u_prev, const ProblemData& data, const StepperConfig& cfg,
                     const std::optional<ScalarField>& psi_start, std::size_t k) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Grid& grid = data.grid();
  if (!(u_prev.grid() == grid)) throw ValidationError("u_prev lives on a different grid");

  std::vector<double> start(grid.interior_nodes().size(), 0.0);
  if (psi_start) {
    if (!(psi_start->grid() == grid)) throw ValidationError("psi_start lives on a different grid");
    for (std::size_t s = 0; s < start.size(); ++s) start[s] = (*psi_start)[grid.interior_nodes()[s]];
  } else {
    const ScalarField lap = apply_laplacian(u_prev);
    for (std::size_t s = 0; s < start.size(); ++s) {
      const double l = lap[grid.interior_nodes()[s]];
      start[s] = l > 0.0 ? -std::log(l) : 0.0;
    }
  }

  const StepSolver solver(u_prev, data, cfg);
  std::vector<double> history;
  std::size_t iters = 0;
  int stages = cfg.homotopy_stages;
  StageResult res;
  if (const auto r0 = previous_state_residual(u_prev, data, solver.full_field(start, 1.0), cfg)) {
    // (u_prev, psi_start) already solves the step system; keep it bit for bit.
    res.converged = true;
    res.x = start;
    res.u = u_prev;
    res.residual = *r0;
    stages = 1;
  } else {
    res = solver.run(start, stages, history, iters);
    if (!res.converged && stages == 1) {
      stages = kFallbackStages;
      res = solver.run(start, stages, history, iters);
    }
  }
  if (!res.converged) {
    const double last = history.empty() ? 0.0 : history.back();
    std::ostringstream msg;
    msg << "step " << k << ": fixed-point iteration did not reach fp_tol " << cfg.fp_tol
        << " (last residual " << last << ")";
    throw SolveError(msg.str(), last, std::move(history));
  }

  ScalarField psi = solver.full_field(res.x, 1.0);
  std::vector<double> rho(psi.size());
  for (std::size_t n = 0; n < rho.size(); ++n) rho[n] = std::exp(psi[n]);

  const PsiBox box = psi_box_bounds(data, u_prev, *res.u, cfg.tau);
  if (!box.contains(psi, cfg.fp_tol)) {
    std::ostringstream msg;
    msg << "step " << k << ": converged psi leaves the box [-" << box.lower_magnitude << ", "
        << box.upper << "]";
    throw SolveError(msg.str(), res.residual, std::move(history));
  }

  StepState state{k,
                  std::move(*res.u),
                  std::move(psi),
                  ScalarField(data.grid_ptr(), std::move(rho)),
                  res.residual,
                  iters,
                  stages,
                  0.0};
  state.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return state;
}

Trajectory run_rothe(const ProblemData& data, double T, std::size_t j, const StepperConfig& cfg) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("final time T must be positive");
  if (j < 1) throw ValidationError("number of steps j must be at least 1");
  StepperConfig step_cfg = cfg;
  step_cfg.tau = T / static_cast<double>(j);
  step_cfg.validate();

  Trajectory traj{data.smoothed(cfg.smoothing_passes), step_cfg.tau, {}};
  traj.states.reserve(j + 1);
  traj.states.push_back(initial_state(traj.data));
  for (std::size_t k = 1; k <= j; ++k) {
    const StepState& prev = traj.states.back();
    traj.states.push_back(solve_step(prev.u, traj.data, step_cfg, prev.psi, k));
  }
  return traj;
}

}  // namespace facetflow

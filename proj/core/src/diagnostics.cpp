#include "facetflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "facetflow/error.hpp"
#include "facetflow/problem.hpp"

namespace facetflow {

namespace {

using Vec = std::vector<double>;

Vec map_values(const ScalarField& f, double (*op)(double)) {
  Vec v(f.size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = op(f[n]);
  return v;
}

double cube(double v) { return v * v * v; }

Vec exp3(const ScalarField& psi) {
  return map_values(psi, [](double p) { return std::exp(3.0 * p); });
}

// Laplace_h exp(3 psi) inside; tau psi on the boundary, where u_k - u_{k-1}
// vanishes and the flux equation reduces to Lap exp(3 psi) = tau psi.
Vec laplace_rho3(const Grid& grid, const ScalarField& psi, double tau) {
  const Vec w = exp3(psi);
  Vec lap(w.size(), 0.0);
  laplacian_into(grid, w, lap);
  for (auto node : grid.boundary_nodes()) lap[node] = tau * psi[node];
  return lap;
}

// Derivative along one axis: central inside, second-order one-sided at the ends.
double axis_derivative(const Grid& grid, std::span<const double> f, std::size_t node, int axis) {
  const auto [i, j] = grid.ij(node);
  const int pos = axis == 0 ? i : j;
  const int last = grid.cells(axis);
  const double h = grid.spacing(axis);
  auto at = [&](int p) { return axis == 0 ? f[grid.index(p, j)] : f[grid.index(i, p)]; };
  if (pos == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  if (pos == last) return (3.0 * at(last) - 4.0 * at(last - 1) + at(last - 2)) / (2.0 * h);
  return (at(pos + 1) - at(pos - 1)) / (2.0 * h);
}

std::vector<std::array<double, 2>> nodal_gradient(const Grid& grid, std::span<const double> f) {
  std::vector<std::array<double, 2>> g(grid.node_count(), {0.0, 0.0});
  for (std::size_t n = 0; n < g.size(); ++n) {
    for (int axis = 0; axis < grid.dim(); ++axis) g[n][axis] = axis_derivative(grid, f, n, axis);
  }
  return g;
}

double interval_integral(const Grid& grid, const ScalarField& right, const ScalarField& left,
                         double tau, double (*op)(double, double, double)) {
  double sum = 0.0;
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    sum += grid.quadrature_weight(n) * op(right[n], left[n], tau);
  }
  return sum;
}

const std::array<double, 2> kGaussNodes{0.5 - 0.5 / std::numbers::sqrt3, 0.5 + 0.5 / std::numbers::sqrt3};

}  // namespace

const std::vector<std::string>& DiagnosticsReport::column_names() {
  static const std::vector<std::string> names{
      "k",           "t",          "energy",          "mass_like",       "cum_laplace_rho3_sq",
      "cum_weighted_flux", "grad_u_sq", "cum_grad_rho_sq", "cum_negative_psi", "du_dt_sq",
      "cum_drho_dt_sq", "min_rho", "min_laplacian_u", "max_u_over_b0",   "box_lower",
      "box_upper",   "box_margin", "residual"};
  return names;
}

std::vector<double> DiagnosticsReport::row(std::size_t k) const {
  return {static_cast<double>(k), time[k],         energy[k],           mass_like[k],
          cum_laplace_rho3_sq[k], cum_weighted_flux[k], grad_u_sq[k],   cum_grad_rho_sq[k],
          cum_negative_psi[k],    du_dt_sq[k],     cum_drho_dt_sq[k],   min_rho[k],
          min_laplacian_u[k],     max_u_over_b0[k], box_lower[k],       box_upper[k],
          box_margin[k],          residual[k]};
}

DiagnosticsReport apriori_report(const Trajectory& traj) {
  const Grid& grid = traj.grid();
  const double tau = traj.tau;
  const std::size_t count = traj.states.size();
  const double b0_max = traj.data.b0().boundary_max();

  DiagnosticsReport r;
  for (auto* series :
       {&r.time, &r.energy, &r.mass_like, &r.cum_laplace_rho3_sq, &r.cum_weighted_flux,
        &r.grad_u_sq, &r.cum_grad_rho_sq, &r.cum_negative_psi, &r.du_dt_sq, &r.cum_drho_dt_sq,
        &r.min_rho, &r.min_laplacian_u, &r.max_u_over_b0, &r.box_lower, &r.box_upper,
        &r.box_margin, &r.residual}) {
    series->assign(count, 0.0);
  }

  for (std::size_t k = 0; k < count; ++k) {
    const StepState& s = traj.states[k];
    r.time[k] = traj.time(k);
    r.energy[k] = dirichlet_energy(s.u);
    r.grad_u_sq[k] = 2.0 * r.energy[k];
    Vec mass(s.psi.size());
    for (std::size_t n = 0; n < mass.size(); ++n) {
      mass[n] = std::exp(2.0 * s.psi[n]) + std::exp(-s.psi[n]);
    }
    r.mass_like[k] = integrate(grid, mass);
    r.min_rho[k] = s.rho.min();
    const ScalarField lap_u = apply_laplacian(s.u);
    double min_lap = std::numeric_limits<double>::infinity();
    for (auto node : grid.interior_nodes()) min_lap = std::min(min_lap, lap_u[node]);
    r.min_laplacian_u[k] = min_lap;
    r.max_u_over_b0[k] = s.u.max() - b0_max;
    r.residual[k] = s.residual;
    if (k == 0) continue;

    const StepState& prev = traj.states[k - 1];
    const Vec lap_w = laplace_rho3(grid, s.psi, tau);
    Vec sq(lap_w.size());
    for (std::size_t n = 0; n < sq.size(); ++n) sq[n] = lap_w[n] * lap_w[n];
    r.cum_laplace_rho3_sq[k] = r.cum_laplace_rho3_sq[k - 1] + tau * integrate(grid, sq);
    r.cum_weighted_flux[k] =
        r.cum_weighted_flux[k - 1] + tau * tau * weighted_gradient_integral(grid, exp3(s.psi), s.psi.values());
    r.cum_grad_rho_sq[k] = r.cum_grad_rho_sq[k - 1] + tau * 2.0 * dirichlet_energy(s.rho);
    Vec neg(s.psi.size(), 0.0);
    for (std::size_t n = 0; n < neg.size(); ++n) {
      if (s.psi[n] <= 0.0) neg[n] = -s.psi[n] * std::exp(-s.psi[n]);
    }
    r.cum_negative_psi[k] = r.cum_negative_psi[k - 1] + tau * tau * integrate(grid, neg);
    r.du_dt_sq[k] = interval_integral(grid, s.u, prev.u, tau, [](double a, double b, double t) {
      const double d = (a - b) / t;
      return d * d;
    });
    r.cum_drho_dt_sq[k] =
        r.cum_drho_dt_sq[k - 1] + tau * interval_integral(grid, s.rho, prev.rho, tau,
                                                          [](double a, double b, double t) {
                                                            const double d = (a - b) / t;
                                                            return d * d;
                                                          });
    const PsiBox box = psi_box_bounds(traj.data, prev.u, s.u, tau);
    r.box_lower[k] = box.lower_magnitude;
    r.box_upper[k] = box.upper;
    r.box_margin[k] = box.margin(s.psi);
  }
  return r;
}

const std::vector<std::string>& AprioriSummary::names() {
  static const std::vector<std::string> n{"max_mass_like", "laplace_rho3_sq", "weighted_flux",
                                          "max_grad_u_sq", "grad_rho_sq",     "negative_psi",
                                          "max_du_dt_sq",  "drho_dt_sq"};
  return n;
}

std::vector<double> AprioriSummary::values() const {
  return {max_mass_like, laplace_rho3_sq, weighted_flux, max_grad_u_sq,
          grad_rho_sq,   negative_psi,    max_du_dt_sq,  drho_dt_sq};
}

AprioriSummary summarize(const DiagnosticsReport& report) {
  auto max_of = [](const Vec& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); };
  auto last_of = [](const Vec& v) { return v.empty() ? 0.0 : v.back(); };
  AprioriSummary s;
  s.max_mass_like = max_of(report.mass_like);
  s.laplace_rho3_sq = last_of(report.cum_laplace_rho3_sq);
  s.weighted_flux = last_of(report.cum_weighted_flux);
  s.max_grad_u_sq = max_of(report.grad_u_sq);
  s.grad_rho_sq = last_of(report.cum_grad_rho_sq);
  s.negative_psi = last_of(report.cum_negative_psi);
  s.max_du_dt_sq = max_of(report.du_dt_sq);
  s.drho_dt_sq = last_of(report.cum_drho_dt_sq);
  return s;
}

// ---------------------------------------------------------------------------
// Test functions

TestFunction zero_test_function() {
  TestFunction xi;
  xi.name = "zero";
  xi.value = [](double, double, double) { return 0.0; };
  xi.gradient = [](double, double, double) { return std::array<double, 2>{0.0, 0.0}; };
  xi.laplacian = [](double, double, double) { return 0.0; };
  return xi;
}

namespace {

// Builds prod_axis phi(x_axis) from a 1D profile with derivatives phi, phi', phi''.
struct Profile {
  std::function<double(double)> f, df, d2f;
};

TestFunction tensor_product(const std::string& name, const Grid& grid,
                            const std::function<Profile(double)>& make) {
  const int dim = grid.dim();
  const Profile px = make(grid.length(0));
  const Profile py = dim == 2 ? make(grid.length(1)) : Profile{};
  TestFunction xi;
  xi.name = name;
  if (dim == 1) {
    xi.value = [px](double x, double, double) { return px.f(x); };
    xi.gradient = [px](double x, double, double) { return std::array<double, 2>{px.df(x), 0.0}; };
    xi.laplacian = [px](double x, double, double) { return px.d2f(x); };
  } else {
    xi.value = [px, py](double x, double y, double) { return px.f(x) * py.f(y); };
    xi.gradient = [px, py](double x, double y, double) {
      return std::array<double, 2>{px.df(x) * py.f(y), px.f(x) * py.df(y)};
    };
    xi.laplacian = [px, py](double x, double y, double) {
      return px.d2f(x) * py.f(y) + px.f(x) * py.d2f(y);
    };
  }
  return xi;
}

}  // namespace

TestFunction polynomial_bubble(const Grid& grid) {
  return tensor_product("bubble", grid, [](double L) {
    const double s = 1.0 / (L * L);
    return Profile{[=](double x) { return s * x * (L - x); }, [=](double x) { return s * (L - 2.0 * x); },
                   [=](double) { return -2.0 * s; }};
  });
}

TestFunction sine_squared_bubble(const Grid& grid) {
  return tensor_product("sin2", grid, [](double L) {
    const double k = std::numbers::pi / L;
    return Profile{[=](double x) {
                     const double s = std::sin(k * x);
                     return s * s;
                   },
                   [=](double x) { return k * std::sin(2.0 * k * x); },
                   [=](double x) { return 2.0 * k * k * std::cos(2.0 * k * x); }};
  });
}

TestFunction signed_sine(const Grid& grid) {
  TestFunction base = tensor_product("signed_sine", grid, [](double L) {
    const double k = std::numbers::pi / L;
    return Profile{[=](double x) { return std::sin(k * x); },
                   [=](double x) { return k * std::cos(k * x); },
                   [=](double x) { return -k * k * std::sin(k * x); }};
  });
  TestFunction xi = base;
  auto c = [](double t) { return std::cos(std::numbers::pi * t); };
  xi.value = [base, c](double x, double y, double t) { return c(t) * base.value(x, y, t); };
  xi.gradient = [base, c](double x, double y, double t) {
    auto g = base.gradient(x, y, t);
    return std::array<double, 2>{c(t) * g[0], c(t) * g[1]};
  };
  xi.laplacian = [base, c](double x, double y, double t) { return c(t) * base.laplacian(x, y, t); };
  xi.nonnegative = false;
  return xi;
}

TestFunction scaled(const TestFunction& xi, double factor) {
  TestFunction out;
  out.name = xi.name + "*" + std::to_string(factor);
  out.value = [xi, factor](double x, double y, double t) { return factor * xi.value(x, y, t); };
  out.gradient = [xi, factor](double x, double y, double t) {
    auto g = xi.gradient(x, y, t);
    return std::array<double, 2>{factor * g[0], factor * g[1]};
  };
  out.laplacian = [xi, factor](double x, double y, double t) { return factor * xi.laplacian(x, y, t); };
  out.vanishes_on_lateral_boundary = xi.vanishes_on_lateral_boundary;
  out.nonnegative = xi.nonnegative && factor >= 0.0;
  return out;
}

TestFunction sum(const TestFunction& a, const TestFunction& b) {
  TestFunction out;
  out.name = a.name + "+" + b.name;
  out.value = [a, b](double x, double y, double t) { return a.value(x, y, t) + b.value(x, y, t); };
  out.gradient = [a, b](double x, double y, double t) {
    auto ga = a.gradient(x, y, t);
    auto gb = b.gradient(x, y, t);
    return std::array<double, 2>{ga[0] + gb[0], ga[1] + gb[1]};
  };
  out.laplacian = [a, b](double x, double y, double t) {
    return a.laplacian(x, y, t) + b.laplacian(x, y, t);
  };
  out.vanishes_on_lateral_boundary = a.vanishes_on_lateral_boundary && b.vanishes_on_lateral_boundary;
  out.nonnegative = a.nonnegative && b.nonnegative;
  return out;
}

TestFunction test_function_by_name(const std::string& name, const Grid& grid) {
  if (name == "zero") return zero_test_function();
  if (name == "bubble") return polynomial_bubble(grid);
  if (name == "sin2") return sine_squared_bubble(grid);
  if (name == "signed_sine") return signed_sine(grid);
  throw ValidationError("unknown test function '" + name + "'");
}

// ---------------------------------------------------------------------------
// Weak residual

double weak_residual_scale(const Trajectory& traj) {
  const Grid& grid = traj.grid();
  double peak = 0.0;
  double drho = 0.0;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const StepState& s = traj.states[k];
    const Vec w = exp3(s.psi);
    const auto grad = nodal_gradient(grid, w);
    const Vec lap = k == 0 ? laplacian_with_boundary_extension(ScalarField(s.psi.grid_ptr(), w)).vector()
                           : laplace_rho3(grid, s.psi, traj.tau);
    double wmax = 0.0, gmax = 0.0, lmax = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n) {
      wmax = std::max(wmax, std::abs(w[n]));
      gmax = std::max(gmax, std::hypot(grad[n][0], grad[n][1]));
      lmax = std::max(lmax, std::abs(lap[n]));
    }
    peak = std::max(peak, wmax + gmax + lmax);
    if (k > 0) {
      const StepState& prev = traj.states[k - 1];
      for (std::size_t n = 0; n < w.size(); ++n) {
        const double d = (s.rho[n] - prev.rho[n]) / traj.tau;
        drho += traj.tau * grid.quadrature_weight(n) * d * d;
      }
    }
  }
  return peak * peak + drho;
}

WeakResidual weak_residual(const Trajectory& traj, const TestFunction& xi, WeakMode mode) {
  if (!xi.vanishes_on_lateral_boundary) {
    throw ValidationError("test function '" + xi.name + "' must vanish on the lateral boundary");
  }
  if (mode == WeakMode::inequality && !xi.nonnegative) {
    throw ValidationError("inequality mode requires a nonnegative test function, got '" + xi.name + "'");
  }
  const Grid& grid = traj.grid();
  const double tau = traj.tau;

  // Sample xi at every node and time level and at the quadrature instants.
  std::vector<double> times;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    times.push_back(traj.time(k));
    if (k > 0) {
      for (double g : kGaussNodes) times.push_back(traj.time(k - 1) + g * tau);
    }
  }
  double xi_norm = 0.0;
  for (double t : times) {
    for (std::size_t n = 0; n < grid.node_count(); ++n) {
      const auto x = grid.coord(n);
      const auto g = xi.gradient(x[0], x[1], t);
      xi_norm = std::max({xi_norm, std::abs(xi.value(x[0], x[1], t)), std::hypot(g[0], g[1]),
                          std::abs(xi.laplacian(x[0], x[1], t))});
    }
  }
  const double flag_tol = 1e-12 * std::max(1.0, xi_norm);
  for (double t : times) {
    for (std::size_t n = 0; n < grid.node_count(); ++n) {
      const auto x = grid.coord(n);
      const double v = xi.value(x[0], x[1], t);
      if (grid.is_boundary(n) && std::abs(v) > flag_tol) {
        std::ostringstream msg;
        msg << "test function '" << xi.name << "' is " << v << " at boundary node " << n << ", t = " << t;
        throw ValidationError(msg.str());
      }
      if (mode == WeakMode::inequality && v < -flag_tol) {
        std::ostringstream msg;
        msg << "test function '" << xi.name << "' is negative (" << v << ") at node " << n << ", t = " << t;
        throw ValidationError(msg.str());
      }
    }
  }

  WeakResidual out;
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    const StepState& s = traj.states[k];
    const StepState& prev = traj.states[k - 1];
    const Vec w = exp3(s.psi);
    const Vec lap = laplace_rho3(grid, s.psi, tau);
    const auto grad = nodal_gradient(grid, w);
    for (double g : kGaussNodes) {
      const double t = traj.time(k - 1) + g * tau;
      const double wt = 0.5 * tau;
      for (std::size_t n = 0; n < grid.node_count(); ++n) {
        const auto x = grid.coord(n);
        const double q = wt * grid.quadrature_weight(n);
        const double v = xi.value(x[0], x[1], t);
        const auto gx = xi.gradient(x[0], x[1], t);
        const double lx = xi.laplacian(x[0], x[1], t);
        const double drho = (s.rho[n] - prev.rho[n]) / tau;
        out.terms[0] += q * drho * s.rho[n] * v;
        out.terms[1] += q * lap[n] * lap[n] * v;
        out.terms[2] += q * 2.0 * lap[n] * (grad[n][0] * gx[0] + grad[n][1] * gx[1]);
        out.terms[3] += q * w[n] * lap[n] * lx;
      }
    }
  }
  out.value = out.terms[0] + out.terms[1] + out.terms[2] + out.terms[3];
  out.scale = weak_residual_scale(traj);
  if (mode == WeakMode::inequality) {
    double h2 = 0.0;
    for (int axis = 0; axis < grid.dim(); ++axis) h2 = std::max(h2, grid.spacing(axis) * grid.spacing(axis));
    out.tol_slack = kWeakResidualDiscConstant * (tau + h2) * xi_norm * out.scale;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hoelder modulus

double holder_modulus(const std::vector<HolderSample>& samples, double alpha_x, double alpha_t) {
  if (samples.size() < 2) throw ValidationError("holder_modulus needs at least 2 samples");
  double sup = 0.0;
  for (std::size_t a = 0; a < samples.size(); ++a) {
    for (std::size_t b = a + 1; b < samples.size(); ++b) {
      const HolderSample& p = samples[a];
      const HolderSample& q = samples[b];
      const double df = std::abs(p.f - q.f);
      if (p.x == q.x && p.t == q.t) {
        if (df != 0.0) {
          std::ostringstream msg;
          msg << "repeated sample point (" << p.x << ", " << p.t << ") with values " << p.f << " and " << q.f;
          throw ValidationError(msg.str());
        }
        continue;
      }
      const double denom = std::pow(std::abs(p.x - q.x), alpha_x) + std::pow(std::abs(p.t - q.t), alpha_t);
      sup = std::max(sup, df / denom);
    }
  }
  return sup;
}

std::vector<HolderSample> cubic_interpolant_samples(const Trajectory& traj, std::size_t per_interval) {
  const Grid& grid = traj.grid();
  if (grid.dim() != 1) throw ValidationError("cubic interpolant samples need a 1D trajectory");
  if (per_interval == 0) throw ValidationError("per_interval must be at least 1");
  std::vector<HolderSample> out;
  const std::size_t nodes = grid.node_count();
  for (std::size_t n = 0; n < nodes; ++n) {
    out.push_back({grid.coord(n)[0], 0.0, cube(traj.states.front().rho[n])});
  }
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    const ScalarField& right = traj.states[k].rho;
    const ScalarField& left = traj.states[k - 1].rho;
    for (std::size_t m = 1; m <= per_interval; ++m) {
      const double lambda = static_cast<double>(m) / static_cast<double>(per_interval);
      const double t = m == per_interval ? traj.time(k) : traj.time(k - 1) + lambda * traj.tau;
      for (std::size_t n = 0; n < nodes; ++n) {
        const double c = m == per_interval ? cube(right[n])
                                           : lambda * cube(right[n]) + (1.0 - lambda) * cube(left[n]);
        out.push_back({grid.coord(n)[0], t, c});
      }
    }
  }
  return out;
}

double holder_reference_norm(const Trajectory& traj) {
  const Grid& grid = traj.grid();
  double dt_sq = 0.0;
  double w22 = 0.0;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const ScalarField& rho = traj.states[k].rho;
    Vec w(rho.size());
    for (std::size_t n = 0; n < w.size(); ++n) w[n] = cube(rho[n]);
    const ScalarField wf(rho.grid_ptr(), w);
    const ScalarField lap = laplacian_with_boundary_extension(wf);
    Vec sq(w.size()), lsq(w.size());
    for (std::size_t n = 0; n < w.size(); ++n) {
      sq[n] = w[n] * w[n];
      lsq[n] = lap[n] * lap[n];
    }
    w22 = std::max(w22, std::sqrt(integrate(grid, sq) + 2.0 * dirichlet_energy(wf) + integrate(grid, lsq)));
    if (k > 0) {
      const ScalarField& prev = traj.states[k - 1].rho;
      for (std::size_t n = 0; n < w.size(); ++n) {
        const double d = (w[n] - cube(prev[n])) / traj.tau;
        dt_sq += traj.tau * grid.quadrature_weight(n) * d * d;
      }
    }
  }
  return std::sqrt(dt_sq) + w22;
}

// ---------------------------------------------------------------------------
// Interpolant gaps

bool GapReport::u_gap_holds(double rel_tol) const {
  for (const IntervalGap& g : intervals) {
    const double allowance = rel_tol * g.u_gap_rhs + round_off_floor;
    if (g.u_gap_lhs > g.u_gap_rhs + allowance) return false;
    if (g.u_gap_identity_defect > allowance) return false;
  }
  return true;
}

bool GapReport::rho_gap_holds(double rel_tol) const {
  const double allowance = rel_tol * rho_gap_rhs + round_off_floor * std::max(1.0, rho_gap_rhs);
  return rho_gap_lhs <= rho_gap_rhs + allowance && rho_gap_identity_defect <= allowance;
}

GapReport interpolant_gap_report(const Trajectory& traj) {
  const Grid& grid = traj.grid();
  const double tau = traj.tau;
  GapReport report;
  double umax = 0.0, rmax = 0.0;
  for (const StepState& s : traj.states) {
    umax = std::max(umax, s.u.max_abs());
    rmax = std::max(rmax, s.rho.max_abs());
  }
  const double eps = std::numeric_limits<double>::epsilon();
  report.round_off_floor = 16.0 * grid.measure() * std::pow(eps * std::max(umax, rmax), 2);

  auto sq_diff = [&](const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t n = 0; n < grid.node_count(); ++n) s += grid.quadrature_weight(n) * (a[n] - b[n]) * (a[n] - b[n]);
    return s;
  };

  constexpr std::array<double, 4> kSamples{0.25, 0.5, 0.75, 1.0};
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    IntervalGap gap;
    gap.k = k;
    const Interpolants mid = eval_interpolants(traj, traj.time(k - 1) + 0.5 * tau);
    double rate = 0.0;
    for (std::size_t n = 0; n < grid.node_count(); ++n) rate += grid.quadrature_weight(n) * mid.du_dt[n] * mid.du_dt[n];
    gap.u_gap_rhs = tau * tau * rate;
    // Supremum, approached as t decreases to t_{k-1}.
    gap.u_gap_lhs = sq_diff(traj.states[k - 1].u, traj.states[k].u);
    for (double lambda : kSamples) {
      const double t = lambda == 1.0 ? traj.time(k) : traj.time(k - 1) + lambda * tau;
      const Interpolants ip = eval_interpolants(traj, t);
      const double lhs = sq_diff(ip.u_tilde, ip.u_bar);
      gap.u_gap_lhs = std::max(gap.u_gap_lhs, lhs);
      const double predicted = (1.0 - lambda) * (1.0 - lambda) * gap.u_gap_rhs;
      gap.u_gap_identity_defect = std::max(gap.u_gap_identity_defect, std::abs(lhs - predicted));
    }
    report.intervals.push_back(gap);

    for (double g : kGaussNodes) {
      const Interpolants ip = eval_interpolants(traj, traj.time(k - 1) + g * tau);
      report.rho_gap_lhs += 0.5 * tau * sq_diff(ip.rho_tilde, ip.rho_bar);
      double r = 0.0;
      for (std::size_t n = 0; n < grid.node_count(); ++n) r += grid.quadrature_weight(n) * ip.drho_dt[n] * ip.drho_dt[n];
      report.rho_gap_rhs += 0.5 * tau * tau * tau * r;
    }

    const ScalarField& right = traj.states[k].rho;
    const ScalarField& left = traj.states[k - 1].rho;
    for (std::size_t n = 0; n < grid.node_count(); ++n) {
      report.cubic_gap = std::max(report.cubic_gap, std::abs(cube(right[n]) - cube(left[n])));
    }
  }
  report.rho_gap_identity_defect = std::abs(report.rho_gap_lhs - report.rho_gap_rhs / 3.0);
  if (grid.dim() == 1 && traj.steps() > 0) {
    report.cubic_bound = kHolderConstant * holder_reference_norm(traj) * std::pow(tau, 0.25);
  }
  return report;
}

}  // namespace facetflow

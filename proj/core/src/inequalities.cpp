#include "facetflow/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "facetflow/error.hpp"

namespace facetflow {

namespace {

constexpr double kUlps = 16.0 * std::numeric_limits<double>::epsilon();

// lhs >= rhs up to slack.
InequalityCheck at_least(double lhs, double rhs, double magnitude) {
  const double slack = kUlps * magnitude;
  return {lhs >= rhs - slack, lhs, rhs, slack};
}

InequalityCheck at_most(double lhs, double rhs, double magnitude) {
  const double slack = kUlps * magnitude;
  return {lhs <= rhs + slack, lhs, rhs, slack};
}

double margin_of(const InequalityCheck& c, bool lhs_below) {
  return (lhs_below ? c.rhs - c.lhs : c.lhs - c.rhs) + c.slack;
}

}  // namespace

std::string to_string(InequalityCase c) {
  switch (c) {
    case InequalityCase::inner_product: return "inner_product";
    case InequalityCase::monotone_primitive: return "monotone_primitive";
    case InequalityCase::exponential: return "exponential";
    case InequalityCase::cubic_reciprocal: return "cubic_reciprocal";
  }
  return "?";
}

InequalityCheck check_inner_product(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw ValidationError("inner_product needs two vectors of equal nonzero length");
  double lhs = 0.0, xx = 0.0, yy = 0.0, mag = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lhs += x[i] * (x[i] - y[i]);
    xx += x[i] * x[i];
    yy += y[i] * y[i];
    mag += std::abs(x[i]) * (std::abs(x[i]) + std::abs(y[i]));
  }
  return at_least(lhs, 0.5 * (xx - yy), mag + xx + yy);
}

InequalityCheck check_monotone_primitive(const std::function<double(double)>& f, const std::function<double(double)>& F,
                    bool increasing, double s, double t) {
  const double fs = f(s);
  const double lhs = fs * (s - t);
  const double Fs = F(s), Ft = F(t);
  const double mag = std::abs(fs) * (std::abs(s) + std::abs(t)) + std::abs(Fs) + std::abs(Ft);
  return increasing ? at_least(lhs, Fs - Ft, mag) : at_most(lhs, Fs - Ft, mag);
}

InequalityCheck check_exponential(double s, double t) {
  const double e3s = std::exp(3.0 * s);
  const double lhs = (std::exp(-s) - std::exp(-t)) * e3s;
  const double rhs = -0.5 * (std::exp(2.0 * s) - std::exp(2.0 * t));
  const double mag = (std::exp(-s) + std::exp(-t)) * e3s + std::exp(2.0 * s) + std::exp(2.0 * t);
  return at_most(lhs, rhs, mag);
}

InequalityCheck check_cubic_reciprocal(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("cubic_reciprocal requires a > 0 and b > 0");
  const double a3 = a * a * a, b3 = b * b * b;
  const double lhs = (a3 - b3) * (1.0 / a - 1.0 / b);
  const double rhs = -3.0 * (a - b) * (a - b);
  const double mag = (a3 + b3) * (1.0 / a + 1.0 / b) + 3.0 * (a * a + b * b);
  return at_most(lhs, rhs, mag);
}

InequalityCheck check_inequality(InequalityCase c, std::span<const double> args) {
  switch (c) {
    case InequalityCase::inner_product:
      if (args.empty() || args.size() % 2 != 0) throw ValidationError("inner_product takes x then y, even length");
      return check_inner_product(args.first(args.size() / 2), args.last(args.size() / 2));
    case InequalityCase::exponential:
      if (args.size() != 2) throw ValidationError("exponential takes {s, t}");
      return check_exponential(args[0], args[1]);
    case InequalityCase::cubic_reciprocal:
      if (args.size() != 2) throw ValidationError("cubic_reciprocal takes {a, b}");
      return check_cubic_reciprocal(args[0], args[1]);
    case InequalityCase::monotone_primitive:
      break;
  }
  throw ValidationError("monotone_primitive needs a function and its antiderivative; use check_monotone_primitive");
}

std::vector<InequalitySuiteRow> inequality_property_suite(std::uint64_t seed, std::size_t samples) {
  std::mt19937_64 rng(seed);
  std::vector<InequalitySuiteRow> rows;
  auto record = [](InequalitySuiteRow& row, const InequalityCheck& c, bool lhs_below) {
    ++row.samples;
    if (!c.holds) ++row.failures;
    const double m = margin_of(c, lhs_below);
    row.worst_margin = row.samples == 1 ? m : std::min(row.worst_margin, m);
  };

  {
    InequalitySuiteRow row{InequalityCase::inner_product};
    std::uniform_int_distribution<int> dim(1, 4);
    std::uniform_real_distribution<double> entry(-10.0, 10.0);
    for (std::size_t i = 0; i < samples; ++i) {
      const int d = dim(rng);
      std::vector<double> x(d), y(d);
      for (int k = 0; k < d; ++k) {
        x[k] = entry(rng);
        y[k] = entry(rng);
      }
      record(row, check_inner_product(x, y), false);
    }
    rows.push_back(row);
  }
  {
    struct Monotone {
      std::function<double(double)> f, F;
      bool increasing;
    };
    const std::vector<Monotone> fns{
        {[](double s) { return std::exp(s); }, [](double s) { return std::exp(s); }, true},
        {[](double s) { return -std::exp(s); }, [](double s) { return -std::exp(s); }, false},
        {[](double s) { return s * s * s; }, [](double s) { return 0.25 * s * s * s * s; }, true},
        {[](double s) { return -s * s * s; }, [](double s) { return -0.25 * s * s * s * s; }, false},
        {[](double s) { return std::atan(s); },
         [](double s) { return s * std::atan(s) - 0.5 * std::log1p(s * s); }, true},
    };
    InequalitySuiteRow row{InequalityCase::monotone_primitive};
    std::uniform_int_distribution<std::size_t> pick(0, fns.size() - 1);
    std::uniform_real_distribution<double> arg(-5.0, 5.0);
    for (std::size_t i = 0; i < samples; ++i) {
      const Monotone& m = fns[pick(rng)];
      const double s = arg(rng), t = arg(rng);
      record(row, check_monotone_primitive(m.f, m.F, m.increasing, s, t), !m.increasing);
    }
    rows.push_back(row);
  }
  {
    InequalitySuiteRow row{InequalityCase::exponential};
    std::uniform_real_distribution<double> arg(-20.0, 20.0);
    for (std::size_t i = 0; i < samples; ++i) {
      const double s = arg(rng), t = arg(rng);
      record(row, check_exponential(s, t), true);
    }
    rows.push_back(row);
  }
  {
    InequalitySuiteRow row{InequalityCase::cubic_reciprocal};
    std::uniform_real_distribution<double> log_arg(std::log(1e-6), std::log(1e3));
    for (std::size_t i = 0; i < samples; ++i) {
      const double a = std::exp(log_arg(rng)), b = std::exp(log_arg(rng));
      record(row, check_cubic_reciprocal(a, b), true);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace facetflow

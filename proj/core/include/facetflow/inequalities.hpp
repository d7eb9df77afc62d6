#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace facetflow {

enum class InequalityCase { inner_product, monotone_primitive, exponential, cubic_reciprocal };

std::string to_string(InequalityCase c);

/// Both sides of one elementary inequality, evaluated as written. `slack` is
/// the rounding allowance (a few ulps of the magnitudes involved) granted to
/// the comparison.
struct InequalityCheck {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
};

/// x.(x - y) >= (|x|^2 - |y|^2) / 2.
InequalityCheck check_inner_product(std::span<const double> x, std::span<const double> y);
/// f(s)(s - t) >= F(s) - F(t) for increasing f (<= for decreasing).
InequalityCheck check_monotone_primitive(const std::function<double(double)>& f, const std::function<double(double)>& F,
                    bool increasing, double s, double t);
/// (e^-s - e^-t) e^3s <= -(e^2s - e^2t) / 2.
InequalityCheck check_exponential(double s, double t);
/// (a^3 - b^3)(1/a - 1/b) <= -3 (a - b)^2; throws ValidationError unless
/// a, b > 0.
InequalityCheck check_cubic_reciprocal(double a, double b);

/// Dispatch on packed arguments: inner_product takes x followed by y (even
/// length), exponential takes {s, t}, cubic_reciprocal takes {a, b}.
/// monotone_primitive needs callables and is rejected here.
InequalityCheck check_inequality(InequalityCase c, std::span<const double> args);

struct InequalitySuiteRow {
  InequalityCase which = InequalityCase::inner_product;
  std::size_t samples = 0;
  std::size_t failures = 0;
  /// Smallest (rhs-side gap + slack) seen; negative iff a failure occurred.
  double worst_margin = 0.0;
};

/// Random property suite: inner_product on vector pairs of dimension 1..4 with
/// entries in [-10, 10]; monotone_primitive on exp, cube, arctan and their
/// negatives with s, t in [-5, 5]; exponential on s, t in [-20, 20];
/// cubic_reciprocal on a, b log-uniform in (1e-6, 1e3).
std::vector<InequalitySuiteRow> inequality_property_suite(std::uint64_t seed, std::size_t samples);

}  // namespace facetflow

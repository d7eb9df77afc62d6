#include <cmath>

#include <gtest/gtest.h>

#include "facetflow/error.hpp"
#include "facetflow/inequalities.hpp"

namespace ff = facetflow;

TEST(ElementaryInequalities, CubicReciprocalWorkedExample) {
  const auto c = ff::check_cubic_reciprocal(1.0, 2.0);
  EXPECT_TRUE(c.holds);
  EXPECT_DOUBLE_EQ(c.lhs, -3.5);
  EXPECT_DOUBLE_EQ(c.rhs, -3.0);
  EXPECT_THROW(ff::check_cubic_reciprocal(0.0, 1.0), ff::ValidationError);
}

TEST(ElementaryInequalities, EqualityCases) {
  const std::vector<double> x{1.0, -2.0, 0.5};
  const auto l1 = ff::check_inner_product(x, x);
  EXPECT_TRUE(l1.holds);
  EXPECT_EQ(l1.lhs, 0.0);
  const auto l3 = ff::check_exponential(0.7, 0.7);
  EXPECT_TRUE(l3.holds);
  EXPECT_EQ(l3.lhs, 0.0);
  EXPECT_EQ(l3.rhs, 0.0);
}

TEST(ElementaryInequalities, MonotonePrimitiveBothDirections) {
  auto cube = [](double s) { return s * s * s; };
  auto quart = [](double s) { return s * s * s * s / 4; };
  EXPECT_TRUE(ff::check_monotone_primitive(cube, quart, true, 1.5, -0.5).holds);
  auto neg = [](double s) { return -std::exp(s); };
  auto neg_int = [](double s) { return -std::exp(s); };
  EXPECT_TRUE(ff::check_monotone_primitive(neg, neg_int, false, 1.0, 2.0).holds);
  // Monotone the wrong way round fails.
  EXPECT_FALSE(ff::check_monotone_primitive(cube, quart, false, 1.5, -0.5).holds);
}

TEST(ElementaryInequalities, DispatchBySpan) {
  const std::vector<double> l1{1.0, 2.0, 0.0, 1.0};
  EXPECT_TRUE(ff::check_inequality(ff::InequalityCase::inner_product, l1).holds);
  const std::vector<double> st{0.3, -1.0};
  EXPECT_TRUE(ff::check_inequality(ff::InequalityCase::exponential, st).holds);
  const std::vector<double> ab{0.2, 5.0};
  EXPECT_TRUE(ff::check_inequality(ff::InequalityCase::cubic_reciprocal, ab).holds);
  EXPECT_THROW(ff::check_inequality(ff::InequalityCase::monotone_primitive, st), ff::ValidationError);
  EXPECT_THROW(ff::check_inequality(ff::InequalityCase::inner_product, std::vector<double>{1.0}), ff::ValidationError);
  EXPECT_EQ(ff::to_string(ff::InequalityCase::exponential), "exponential");
}

TEST(ElementaryInequalities, PropertySuiteSmall) {
  for (std::uint64_t seed : {1u, 2u}) {
    const auto rows = ff::inequality_property_suite(seed, 2000);
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& r : rows) {
      EXPECT_EQ(r.failures, 0u) << ff::to_string(r.which);
      EXPECT_EQ(r.samples, 2000u);
      EXPECT_GE(r.worst_margin, 0.0);
    }
  }
}

#include <gtest/gtest.h>

#include <cmath>

#include "malthus/division_rate.hpp"

using malthus::AgeDivisionRate;

namespace {

AgeDivisionRate two_a_witness(double a_max = 0.99, double h = 1e-3) {
  std::vector<double> a, r;
  const int n = static_cast<int>(std::lround(a_max / h));
  for (int i = 0; i <= n; ++i) {
    const double x = a_max * i / n;
    a.push_back(x);
    r.push_back(2.0 * x / (1.0 - x * x));
  }
  return AgeDivisionRate::tabulated(a, r);
}

}  // namespace

TEST(AgeDivisionRate, ConstantAccessors) {
  const auto B = AgeDivisionRate::constant(2.0);
  EXPECT_EQ(B.rate(3.0), 2.0);
  EXPECT_EQ(B.cumulative(1.5), 3.0);
  EXPECT_NEAR(B.survival(1.0), std::exp(-2.0), 1e-15);
  EXPECT_NEAR(B.density(1.0), 2.0 * std::exp(-2.0), 1e-15);
  EXPECT_NEAR(B.cutoff(), std::log(1e13) / 2.0, 1e-9);
  EXPECT_THROW(AgeDivisionRate::constant(0.0), malthus::InputError);
}

TEST(AgeDivisionRate, PowerLagAccessors) {
  const auto B = AgeDivisionRate::power_lag(2.0, 1.0);
  EXPECT_EQ(B.rate(0.5), 0.0);
  EXPECT_EQ(B.rate(3.0), 4.0);
  EXPECT_NEAR(B.cumulative(3.0), 8.0 / 3.0, 1e-15);
  EXPECT_EQ(B.derivative(3.0), 4.0);
  ASSERT_EQ(B.kinks().size(), 1u);
  EXPECT_EQ(B.kinks()[0], 1.0);
  EXPECT_EQ(B.smooth_from(), 1.0);
  EXPECT_NEAR(B.expectation([](double) { return 1.0; }), 1.0, 1e-10);
  const auto flat = AgeDivisionRate::power_lag(0.0, 1.0);
  EXPECT_EQ(flat.rate(1.0), 1.0);
  EXPECT_EQ(flat.rate(0.999), 0.0);
  EXPECT_THROW(AgeDivisionRate::power_lag(-1.0, 0.0), malthus::InputError);
  EXPECT_THROW(AgeDivisionRate::power_lag(1.0, -1.0), malthus::InputError);
}

TEST(AgeDivisionRate, DensitiesIntegrateToOne) {
  for (const auto& B : {AgeDivisionRate::constant(0.7), AgeDivisionRate::power_lag(0.5, 1.0),
                        AgeDivisionRate::power_lag(7.0, 1.0), two_a_witness()}) {
    EXPECT_NEAR(B.expectation([](double) { return 1.0; }), 1.0, 1e-9) << B.describe();
  }
}

TEST(AgeDivisionRate, TabulatedInterpolatesAndIntegratesExactly) {
  const auto B = AgeDivisionRate::tabulated({0.0, 1.0, 3.0}, {0.0, 2.0, 0.0});
  EXPECT_EQ(B.rate(0.5), 1.0);
  EXPECT_EQ(B.rate(2.0), 1.0);
  EXPECT_NEAR(B.cumulative(0.5), 0.25, 1e-15);
  EXPECT_NEAR(B.cumulative(2.0), 2.5, 1e-15);
  EXPECT_EQ(B.survival(3.5), 0.0);
  EXPECT_NEAR(B.terminal_mass(), std::exp(-3.0), 1e-15);
  EXPECT_EQ(B.support_end(), 3.0);
  EXPECT_EQ(B.derivative(0.5), 2.0);
  EXPECT_EQ(B.derivative(2.0), -1.0);
}

TEST(AgeDivisionRate, TabulatedWitnessIsCloseToLinearDensity) {
  const auto B = two_a_witness();
  for (double a : {0.1, 0.3, 0.6, 0.9}) EXPECT_NEAR(B.density(a), 2.0 * a, 2e-3) << a;
  EXPECT_NEAR(B.terminal_mass(), 1.0 - 0.99 * 0.99, 1e-4);
}

TEST(AgeDivisionRate, TabulatedValidation) {
  EXPECT_THROW(AgeDivisionRate::tabulated({0.0}, {1.0}), malthus::InputError);
  EXPECT_THROW(AgeDivisionRate::tabulated({0.1, 1.0}, {1.0, 1.0}), malthus::InputError);
  EXPECT_THROW(AgeDivisionRate::tabulated({0.0, 1.0, 1.0}, {1.0, 1.0, 1.0}), malthus::InputError);
  EXPECT_THROW(AgeDivisionRate::tabulated({0.0, 1.0}, {1.0, -1.0}), malthus::InputError);
}

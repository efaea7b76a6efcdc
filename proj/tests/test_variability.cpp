#include <gtest/gtest.h>

#include <cmath>

#include "malthus/numerics.hpp"
#include "malthus/variability.hpp"
#include "oracles.hpp"

using malthus::AlphaFamily;
using malthus::VariabilitySpec;

namespace {

double quad_mean(const VariabilitySpec& rho) {
  const auto [lo, hi] = rho.support();
  return malthus::numerics::integrate([&](double v) { return v * rho.density(v); }, lo, hi);
}

}  // namespace

TEST(Variability, DiracMoments) {
  const auto d = VariabilitySpec::dirac(1.3);
  EXPECT_EQ(d.mean(), 1.3);
  EXPECT_EQ(d.variance(), 0.0);
  EXPECT_TRUE(d.is_degenerate());
  EXPECT_FALSE(d.is_density());
  EXPECT_THROW(d.density(1.3), malthus::InputError);
  EXPECT_THROW(VariabilitySpec::dirac(0.0), malthus::InputError);
}

TEST(Variability, TruncatedGaussianMomentsMatchQuadrature) {
  const auto tg = VariabilitySpec::truncated_gaussian(0.0, 2.0, 0.7);
  EXPECT_NEAR(tg.mean(), 1.0, 1e-15);
  EXPECT_NEAR(quad_mean(tg), 1.0, 1e-9);
  const double var = malthus::numerics::integrate([&](double v) { return (v - 1) * (v - 1) * tg.density(v); }, 0.0, 2.0);
  EXPECT_NEAR(tg.variance(), var, 1e-9);
  EXPECT_NEAR(tg.cv(), 0.50, 0.005);
  EXPECT_NEAR(malthus::numerics::integrate([&](double v) { return tg.density(v); }, 0.0, 2.0), 1.0, 1e-9);
}

TEST(Variability, NodesIntegrateMoments) {
  for (const auto& rho : {VariabilitySpec::truncated_gaussian(0.0, 2.0, 0.7), VariabilitySpec::uniform(0.5, 1.5),
                          VariabilitySpec::two_point(0.5, 1.5)}) {
    double w = 0.0, m = 0.0, m2 = 0.0;
    for (const auto& n : rho.nodes()) {
      w += n.w;
      m += n.w * n.x;
      m2 += n.w * n.x * n.x;
    }
    EXPECT_NEAR(w, 1.0, 1e-14);
    EXPECT_NEAR(m, rho.mean(), 1e-12);
    EXPECT_NEAR(m2 - m * m, rho.variance(), 1e-12);
  }
}

TEST(Variability, MixtureNormalisesWeights) {
  const auto mix = VariabilitySpec::mixture({{1.0, 2.0}, {3.0, 6.0}});
  EXPECT_NEAR(mix.mean(), 2.5, 1e-15);
  EXPECT_NEAR(mix.variance(), 0.75, 1e-15);
  EXPECT_THROW(VariabilitySpec::mixture({}), malthus::InputError);
  EXPECT_THROW(VariabilitySpec::mixture({{1.0, 0.0}}), malthus::InputError);
  EXPECT_TRUE(VariabilitySpec::mixture({{1.0, 1.0}}).is_degenerate());
}

TEST(AlphaFamily, MeanPreservedAndCvScales) {
  const auto base = VariabilitySpec::truncated_gaussian(0.0, 2.0, 0.7);
  for (double alpha : {0.1, 0.4, 0.9, 1.0}) {
    const AlphaFamily fam(base, alpha);
    const auto rho = fam.realized();
    EXPECT_NEAR(rho.mean(), 1.0, 1e-14);
    EXPECT_NEAR(quad_mean(rho), 1.0, 1e-9);
    EXPECT_NEAR(rho.cv(), alpha * base.cv(), 1e-12);
    EXPECT_NEAR(fam.cv(), alpha * base.cv(), 1e-15);
    EXPECT_NEAR(rho.support().first, 1.0 - alpha, 1e-15);
    EXPECT_NEAR(rho.support().second, 1.0 + alpha, 1e-15);
  }
  EXPECT_TRUE(base.contract(0.0).is_degenerate());
  EXPECT_EQ(base.contract(0.0).mean(), 1.0);
}

TEST(AlphaFamily, RejectsDegenerateBaselineAndBadAlpha) {
  EXPECT_THROW(AlphaFamily(VariabilitySpec::dirac(1.0), 0.5), malthus::InputError);
  EXPECT_THROW(AlphaFamily(VariabilitySpec::two_point(0.5, 1.5), 0.0), malthus::InputError);
  EXPECT_THROW(AlphaFamily(VariabilitySpec::two_point(0.5, 1.5), 1.5), malthus::InputError);
}

TEST(Variability, TruncatedGaussianSamplesHaveTargetMoments) {
  const auto tg = VariabilitySpec::truncated_gaussian(0.0, 2.0, 0.7);
  malthus::Philox4x64 gen({11, 0}, 0);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = tg.sample(gen);
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 2.0);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  const double sd = std::sqrt(s2 / n - mean * mean);
  EXPECT_NEAR(mean, 1.0, 0.01);
  EXPECT_NEAR(sd / mean, 0.50, 0.01);
}

TEST(Variability, ContractedSamplesStayInSupport) {
  const auto rho = AlphaFamily(VariabilitySpec::truncated_gaussian(0.0, 2.0, 0.7), 0.4).realized();
  malthus::Philox4x64 gen({12, 0}, 0);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = rho.sample(gen);
    ASSERT_GE(v, 0.6);
    ASSERT_LE(v, 1.4);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  EXPECT_NEAR(std::sqrt(s2 / n - mean * mean) / mean, 0.20, 0.005);
}

TEST(Variability, MixtureSampling) {
  const auto mix = VariabilitySpec::mixture({{1.0, 1.0}, {2.0, 3.0}});
  malthus::Philox4x64 gen({13, 0}, 0);
  int twos = 0;
  for (int i = 0; i < 40000; ++i) twos += mix.sample(gen) == 2.0;
  EXPECT_NEAR(twos / 40000.0, 0.75, 0.01);
}

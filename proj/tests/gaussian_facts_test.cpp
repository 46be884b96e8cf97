#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sketchrec/gaussian_facts.hpp"

using namespace sketchrec;

TEST(GaussianTv, ZeroShiftIsZero) {
  EXPECT_EQ(gaussian_tv_analytic(0.0), 0.0);
}

TEST(GaussianTv, AnalyticAgainstErf) {
  // P(|g| <= 1) = erf(1 / sqrt 2) = 0.682689...
  EXPECT_NEAR(gaussian_tv_analytic(2.0), 0.6826894921370859, 1e-12);
  for (double t : {0.1, 0.5, 1.0, 3.0, 6.0}) {
    EXPECT_NEAR(gaussian_tv_analytic(t), std::erf(t / 2 / std::numbers::sqrt2), 1e-12);
  }
}

TEST(GaussianTv, MonteCarloAgreesWithinTolerance) {
  EXPECT_NEAR(gaussian_tv_monte_carlo(2.0, 1000000, 7), 0.6827, 0.01);
  const std::vector<double> taus{0.5, 1.0, 2.0};
  const auto rows = gaussian_fact_check(taus, 200000, 3);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.monte_carlo, r.analytic, 0.02) << r.tau;
    EXPECT_DOUBLE_EQ(r.gap, std::abs(r.monte_carlo - r.analytic));
  }
}

TEST(GaussianTv, RejectsTooFewSamples) {
  const std::vector<double> taus{1.0};
  EXPECT_THROW(gaussian_fact_check(taus, 99999, 1), std::invalid_argument);
}

TEST(GaussianFacts, L2ConcentrationFrequency) {
  const auto ev = fact_l2_concentration(0.05, 20000, 5);
  EXPECT_EQ(ev.dim, static_cast<std::size_t>(std::ceil(18 * std::log(6 / 0.05))));
  EXPECT_DOUBLE_EQ(ev.bound, 1 - 0.05 / 3);
  EXPECT_TRUE(ev.passed()) << ev.frequency();
}

TEST(GaussianFacts, UnivariateTail) {
  const auto ev = fact_univariate_tail(0.05, 100000, 6);
  EXPECT_DOUBLE_EQ(ev.hi, 4 * std::sqrt(std::log(20.0)));
  EXPECT_TRUE(ev.passed());
}

TEST(GaussianFacts, L1WindowAsStated) {
  const auto ev = fact_l1_concentration(0.05, 1000, 7);
  EXPECT_EQ(ev.dim, 154u);  // ceil(32 ln 120)
  EXPECT_DOUBLE_EQ(ev.lo, 154.0 / 8);
  EXPECT_DOUBLE_EQ(ev.hi, 3 * 154.0 / 4);
  // E||x||_1 = sqrt(2/pi) n lies above the stated upper end.
  EXPECT_GT(std::sqrt(2 / std::numbers::pi) * 154, ev.hi);
  const Interval c = l1_centered_interval(154);
  EXPECT_NEAR((c.lo + c.hi) / 2, std::sqrt(2 / std::numbers::pi) * 154, 1e-9);
  EXPECT_NEAR(c.hi - c.lo, 154.0 / 2, 1e-9);
}

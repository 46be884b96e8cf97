#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "sketchrec/pipeline.hpp"
#include "sketchrec/prime_field.hpp"
#include "sketchrec/stream.hpp"

using namespace sketchrec;

TEST(Schedule, KOneIsASingleLevel) {
  const auto q = quadratic_schedule(1, 0.1);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q[0].k, 1u);
  EXPECT_EQ(fast_schedule(1, 0.1).size(), 1u);
  SparseRecoveryPipeline p(1024, 1, 0.1, Schedule::quadratic, 1);
  EXPECT_EQ(p.level_count(), 1u);
  EXPECT_EQ(p.measurement_count(), p.system(0).measurement_count());
}

TEST(Schedule, QuadraticPlugInAtK81) {
  // ceil(log3 81) + 1 = 5 levels; 3 log2 log2 81 = 7.99 so every level is early.
  const auto s = quadratic_schedule(81, 0.25);
  ASSERT_EQ(s.size(), 5u);
  const std::size_t ks[] = {81, 27, 9, 3, 1};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(s[i].k, ks[i]);
    EXPECT_DOUBLE_EQ(s[i].eps, 0.25 / std::pow(2.0, static_cast<double>(i)));
    EXPECT_DOUBLE_EQ(s[i].zeta, 1.0 / 3.0);
    EXPECT_GT(s[i].delta, 0.0);
    EXPECT_LT(s[i].delta, 1.0);
  }
}

TEST(Schedule, FastEndsWithQuadraticAtRootK) {
  const auto s = fast_schedule(81, 0.25);
  // weak levels at 81, 27 (27 > 9), then the quadratic machine at K = 9 and eps / 4
  ASSERT_GE(s.size(), 3u);
  EXPECT_EQ(s[0].k, 81u);
  EXPECT_EQ(s[1].k, 27u);
  EXPECT_EQ(s[2].k, 9u);
  EXPECT_DOUBLE_EQ(s[2].eps, 0.25 / 4);
  EXPECT_EQ(s.back().k, 1u);
}

TEST(Pipeline, RowCountWithinBudget) {
  const double ref = pipeline_row_reference(1u << 16, 64, 0.125);
  EXPECT_NEAR(ref, 512.0 * 13.0, 1e-6);  // (64/0.125) log2(2^16 / 8)
  for (Schedule s : {Schedule::quadratic, Schedule::fast}) {
    SparseRecoveryPipeline p(1u << 16, 64, 0.125, s, 3);
    std::size_t sum = 0;
    for (std::size_t i = 0; i < p.level_count(); ++i) sum += p.system(i).measurement_count();
    EXPECT_EQ(p.measurement_count(), sum);
    EXPECT_LE(static_cast<double>(p.measurement_count()), 8.0 * ref) << to_string(s);
  }
}

TEST(Pipeline, MeasurementCountIsDeterministic) {
  SparseRecoveryPipeline a(4096, 9, 0.2, Schedule::fast, 5), b(4096, 9, 0.2, Schedule::fast, 5);
  EXPECT_EQ(a.measurement_count(), b.measurement_count());
  const auto sig = gen_sparse(4096, 9, 1);
  EXPECT_EQ(a.measure(sig.x.view()), b.measure(sig.x.view()));
}

TEST(Pipeline, ZeroVectorGivesZero) {
  SparseRecoveryPipeline p(2048, 8, 0.2, Schedule::quadratic, 2);
  EXPECT_TRUE(p.recover(p.measure(std::vector<double>(2048, 0.0))).xhat.empty());
}

TEST(Pipeline, ExactlySparseSignalsAreRecovered) {
  for (Schedule s : {Schedule::quadratic, Schedule::fast}) {
    std::size_t exact = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto sig = gen_sparse(4096, 16, seed);
      SparseRecoveryPipeline p(4096, 16, 0.1, s, 1000 + seed);
      const auto r = p.recover(p.measure(sig.x.view()));
      exact += recovery_error(sig.x.view(), r.xhat) <= 1e-18 * sig.x.norm2_sq();
    }
    EXPECT_GE(exact, 95u) << to_string(s);
  }
}

TEST(Pipeline, ResidualBookkeepingMatchesRemeasurement) {
  for (Schedule s : {Schedule::quadratic, Schedule::fast}) {
    const auto sig = gen_power_law(4096, 16, 1.0, 4.0, 1.0 / 64, 7);
    SparseRecoveryPipeline p(4096, 16, 0.1, s, 8);
    const auto r = p.recover(p.measure(sig.x.view()), true);
    ASSERT_EQ(r.levels.size(), p.level_count());
    std::vector<double> rest(sig.x.begin(), sig.x.end());
    for (std::size_t i = 0; i < p.level_count(); ++i) {
      const auto fresh = p.system(i).measure(rest);
      ASSERT_EQ(r.levels[i].residual.size(), fresh.size());
      for (std::size_t j = 0; j < fresh.size(); ++j) {
        EXPECT_NEAR(r.levels[i].residual[j], fresh[j], 1e-9 * (1 + std::abs(fresh[j])));
      }
      for (auto [idx, v] : r.levels[i].found) rest[idx] -= v;
    }
  }
}

TEST(Spiked, GammaFormula) {
  SpikedRecovery a(1024, 16, 0.2, 0.05, 1);
  EXPECT_DOUBLE_EQ(a.gamma(), std::min(0.25, 0.25 * std::sqrt(1.1 * (1 - 16.0 / 1024))));
  SpikedConstants c;
  c.alpha = 1.0;
  SpikedRecovery b(1024, 16, 0.2, 0.05, 1, c);
  EXPECT_DOUBLE_EQ(b.gamma(), 0.25);
  EXPECT_DOUBLE_EQ(a.window_lo(), (1 - a.gamma()) * std::sqrt(0.2 / 16));
  EXPECT_DOUBLE_EQ(a.window_hi(), (1 + a.gamma()) * std::sqrt(0.2 / 16));
  EXPECT_NEAR(spiked_row_reference(65536, 32, 0.2, 0.05), 160 * std::log2(409.6) + 5 * std::log2(20.0), 1e-9);
}

TEST(Spiked, NoiselessSpikesAreExact) {
  // Count-Sketch default sizing. Under the lean defaults a non-spike coordinate
  // occasionally collides with spikes in half its rows and ties at sqrt(eps/k).
  SpikedConstants c;
  c.c_r = 8;
  c.c_b = 16;
  std::size_t exact = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto sig = gen_spiked(16384, 16, 0.2, seed, false);
    SpikedRecovery sr(16384, 16, 0.2, 0.05, 100 + seed, c);
    const auto r = sr.recover(sr.measure(sig.x.view()));
    exact += recovery_error(sig.x.view(), r) <= 1e-20;
  }
  EXPECT_EQ(exact, 50u);
}

TEST(Spiked, FullSupportKeepsEverything) {
  SpikedConstants c;
  c.c_b = 64;  // collision-free at this size with high probability
  const auto sig = gen_spiked(64, 64, 0.5, 3, false);
  SpikedRecovery sr(64, 64, 0.5, 0.05, 4, c);
  EXPECT_EQ(sr.gamma(), 0.0);
  const auto r = sr.recover(sr.measure(sig.x.view()));
  EXPECT_EQ(r.size(), 64u);
}

TEST(Spiked, RecoveryErrorByHand) {
  const std::vector<double> x{1, 2, 3};
  EXPECT_DOUBLE_EQ(recovery_error(x, SparseEntries{{1, 2.0}}), 10.0);
  EXPECT_DOUBLE_EQ(recovery_error(x, SparseEntries{{0, 0.0}, {1, 2.0}, {2, 4.0}}), 2.0);
}

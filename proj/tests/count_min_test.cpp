#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "sketchrec/count_min.hpp"
#include "sketchrec/prime_field.hpp"
#include "sketchrec/stream.hpp"

using namespace sketchrec;

namespace {

bool contains(const std::vector<std::size_t>& v, std::size_t i) { return std::find(v.begin(), v.end(), i) != v.end(); }

TurnstileStream strict_stream(std::size_t n, std::size_t len, std::uint64_t seed) {
  return gen_zipf(n, 1.1, len, StreamMode::strict, seed, 0.2);
}

}  // namespace

TEST(CountMinSizing, DefaultExampleFrozen) {
  // 5 log2(0.05 * 65536) = 58.39 -> 59; 0.05 ln(1000) / (10 (ln 4 - 1)) = 0.089 -> 1.
  const CmSizing s = cm_sizing(65536, 0.05, std::log(1000.0), 1, CmConstants{});
  EXPECT_EQ(s.rows, 60u);
  EXPECT_EQ(s.buckets, 400u);
  EXPECT_EQ(s.independence, 600u);
  EXPECT_EQ(s.list_size, 620u);
}

TEST(CountMinSizing, DeltaNearOneDropsSecondTerm) {
  EXPECT_EQ(cm_sizing(65536, 0.05, 0.0, 1, CmConstants{}).rows, 59u);
}

TEST(CountMinSizing, UnitConstantsByHand) {
  // log2(256) = 8; 0.25 ln 100 = 1.15 -> 2; 1/0.25 = 4; 2/0.25 = 8 list.
  const CmSizing s = cm_sizing(1024, 0.25, std::log(100.0), 1, CmConstants{1, 1, 1, 1});
  EXPECT_EQ(s.rows, 10u);
  EXPECT_EQ(s.buckets, 4u);
  EXPECT_EQ(s.independence, 4u);
  EXPECT_EQ(s.list_size, 8u);
  EXPECT_EQ(cm_sizing(1024, 0.25, 0, 3, CmConstants{1, 1, 1, 1}).buckets, 12u);
}

TEST(CountMinSizing, UniformExponentIsLogBinomial) {
  // ln C(10, 4) = ln 210
  EXPECT_NEAR(uniform_log_inv_delta(10, 0.25), std::log(210.0), 1e-9);
  EXPECT_EQ(uniform_log_inv_delta(3, 0.25), 0.0);
}

TEST(CountMin, RejectsBadParameters) {
  EXPECT_THROW(CountMinG3(100, 0.0, 0.1, 1), std::invalid_argument);
  EXPECT_THROW(CountMinG3(100, 0.5, 1.0, 1), std::invalid_argument);
  EXPECT_THROW(CountMinG3(3, 0.5, 0.1, 1), std::invalid_argument);
  EXPECT_THROW(CountMinG3(100, 0.5, 0.1, 1, {}, 101), std::invalid_argument);
}

TEST(CountMin, CountersEqualRecomputedBucketSums) {
  const std::size_t n = 512;
  CountMinG3 cm(n, 0.25, 0.1, 7);
  const auto s = strict_stream(n, 3000, 1);
  cm.ingest(s);
  const ExactVector x = materialize(s);
  std::vector<double> expect(cm.rows() * cm.buckets(), 0.0);
  for (std::size_t r = 0; r < cm.rows(); ++r) {
    for (std::size_t i = 0; i < n; ++i) expect[r * cm.buckets() + cm.bucket_of(r, i)] += x[i];
  }
  for (std::size_t r = 0; r < cm.rows(); ++r) {
    for (std::size_t b = 0; b < cm.buckets(); ++b) EXPECT_EQ(cm.counter(r, b), expect[r * cm.buckets() + b]);
  }
}

TEST(CountMin, StrictEstimatesNeverUnderestimate) {
  const std::size_t n = 64;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CountMinG3 cm(n, 0.5, 0.2, seed);
    const auto s = strict_stream(n, 500, seed + 100);
    cm.ingest(s);
    const ExactVector x = materialize(s);
    for (std::size_t i = 0; i < n; ++i) EXPECT_GE(cm.point_estimate(i), x[i]);
  }
}

TEST(CountMin, OneRowOneBucketHoldsTheL1Norm) {
  CmConstants c;
  c.c_r = 0;
  c.c_b = 1e-6;
  CountMinG3 cm(200, 0.25, 0.999, 3, c);
  ASSERT_EQ(cm.rows(), 1u);
  ASSERT_EQ(cm.buckets(), 1u);
  const auto s = strict_stream(200, 1000, 4);
  cm.ingest(s);
  const ExactVector x = materialize(s);
  EXPECT_EQ(cm.counter(0, 0), x.norm1());
  for (std::size_t i = 0; i < 200; ++i) EXPECT_EQ(cm.point_estimate(i), x.norm1());
}

TEST(CountMin, SingleNonzeroAtDefaultSize) {
  CountMinG3 cm(65536, 0.05, 1e-3, 11);
  EXPECT_EQ(cm.rows(), 60u);
  EXPECT_EQ(cm.list_size(), 620u);
  cm.update(40000, 5);
  const auto list = cm.query();
  EXPECT_EQ(list.size(), 620u);
  EXPECT_EQ(list.front(), 40000u);
  EXPECT_EQ(cm.point_estimate(40000), 5);
}

TEST(CountMin, ListIsCappedByUniverse) {
  CountMinG3 cm(10, 0.25, 0.1, 1);
  EXPECT_EQ(cm.list_size(), 10u);
  EXPECT_EQ(cm.query().size(), 10u);
}

TEST(CountMin, ZipfHeavyHittersAreListed) {
  const std::size_t n = 4096;
  const double eps = 0.1;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CountMinG3 cm(n, eps, 0.05, seed);
    const auto s = strict_stream(n, 20000, seed);
    cm.ingest(s);
    const ExactVector x = materialize(s);
    const auto list = cm.query();
    for (std::size_t i : exact_heavy_hitters(x.view(), eps, 1)) EXPECT_TRUE(contains(list, i)) << i;
  }
}

TEST(CountMin, PromiseQueries) {
  CountMinG3 cm(1000, 0.25, 0.1, 5, {}, 20);
  EXPECT_EQ(cm.promise_size(), 20u);
  EXPECT_THROW(cm.query(), std::logic_error);
  cm.update(17, 9);
  cm.update(3, 1);
  std::vector<std::size_t> cand(20);
  std::iota(cand.begin(), cand.end(), std::size_t{0});
  const auto list = cm.query_promise(cand);
  EXPECT_EQ(list.front(), 17u);
  EXPECT_TRUE(contains(list, 3));
  cand.push_back(20);
  EXPECT_THROW(cm.query_promise(cand), std::invalid_argument);
  CountMinG3 full(1000, 0.25, 0.1, 5, {}, 1000);
  EXPECT_NO_THROW(full.query());
}

TEST(CountMin, LinearInTheStream) {
  const auto a = strict_stream(300, 800, 1), b = strict_stream(300, 800, 2);
  CountMinG3 sa(300, 0.25, 0.1, 9), sb(300, 0.25, 0.1, 9), sab(300, 0.25, 0.1, 9);
  sa.ingest(a);
  sb.ingest(b);
  sab.ingest(a);
  sab.ingest(b);
  for (std::size_t r = 0; r < sa.rows(); ++r) {
    for (std::size_t k = 0; k < sa.buckets(); ++k) EXPECT_EQ(sab.counter(r, k), sa.counter(r, k) + sb.counter(r, k));
  }
}

TEST(CountMin, IsolatingRowGivesExactEstimates) {
  CountMinG3 cm(8, 0.25, 0.1, 2);  // 80 buckets, 8 indices
  if (!cm.has_isolating_row()) GTEST_SKIP() << "no injective row for this seed";
  const auto s = gen_zipf(8, 1.0, 200, StreamMode::general, 4, 0.3);
  cm.ingest(s);
  const ExactVector x = materialize(s);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_LE(cm.point_estimate(i), x[i] + 1e-12);
}

TEST(Dyadic, LayoutAndLevels) {
  DyadicG3 d(1024, 0.5, 0.1, 1);
  EXPECT_EQ(d.depth(), 10u);
  EXPECT_EQ(d.list_size(), 62u);
  EXPECT_EQ(d.first_sketched_level(), 6u);  // 2^5 = 32 <= 62 < 64
  EXPECT_FALSE(d.has_level(5));
  EXPECT_TRUE(d.has_level(10));
  EXPECT_THROW(d.node_estimate(3, 0), std::out_of_range);
}

TEST(Dyadic, LevelCountersConserveMass) {
  const std::size_t n = 1000;
  DyadicG3 d(n, 0.5, 0.1, 4);
  const auto s = strict_stream(n, 4000, 8);
  d.ingest(s);
  const ExactVector x = materialize(s);
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  for (std::size_t l = d.first_sketched_level(); l <= d.depth(); ++l) {
    for (std::size_t r = 0; r < d.rows(); ++r) {
      double row = 0;
      for (std::size_t b = 0; b < d.buckets(); ++b) row += d.counter(l, r, b);
      EXPECT_NEAR(row, total, 1e-9);
    }
  }
}

TEST(Dyadic, NodeEstimatesDominateSubtreeSums) {
  const std::size_t n = 1000;
  DyadicG3 d(n, 0.5, 0.1, 6);
  const auto s = strict_stream(n, 4000, 9);
  d.ingest(s);
  const ExactVector x = materialize(s);
  for (std::size_t l = d.first_sketched_level(); l <= d.depth(); ++l) {
    const std::size_t width = std::size_t{1} << (d.depth() - l);
    for (std::size_t v = 0; v < (std::size_t{1} << l); ++v) {
      double sum = 0;
      for (std::size_t i = v * width; i < std::min(n, (v + 1) * width); ++i) sum += x[i];
      EXPECT_GE(d.node_estimate(l, v), sum);
    }
  }
}

TEST(Dyadic, SingleItemFollowsItsPath) {
  DyadicG3 d(4096, 0.25, 0.1, 3);
  d.update(2718, 4);
  const auto out = d.query();
  EXPECT_TRUE(contains(out, 2718));
  EXPECT_LE(out.size(), d.list_size());
  for (std::size_t l = d.first_sketched_level(); l <= d.depth(); ++l) {
    EXPECT_EQ(d.node_estimate(l, 2718 >> (d.depth() - l)), 4);
  }
}

TEST(Dyadic, ZipfHeavyHittersAreListed) {
  const std::size_t n = 8192;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    DyadicG3 d(n, 0.1, 0.05, seed);
    const auto s = strict_stream(n, 30000, seed + 50);
    d.ingest(s);
    const ExactVector x = materialize(s);
    const auto out = d.query();
    EXPECT_LE(out.size(), d.list_size());
    for (std::size_t i : exact_heavy_hitters(x.view(), 0.1, 1)) EXPECT_TRUE(contains(out, i)) << i;
  }
}

TEST(Dyadic, SmallUniverseReturnsEverything) {
  DyadicG3 d(40, 0.25, 0.1, 1);
  EXPECT_EQ(d.query().size(), 40u);
}

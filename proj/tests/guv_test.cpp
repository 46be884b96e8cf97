#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "sketchrec/guv.hpp"
#include "sketchrec/prime_field.hpp"
#include "sketchrec/stream.hpp"

using namespace sketchrec;

namespace {

using Poly = std::vector<std::uint32_t>;

// Schoolbook product followed by long division by a monic modulus.
Poly oracle_mulmod(const Poly& a, const Poly& b, const Poly& e, std::uint32_t q) {
  std::vector<std::uint64_t> prod(a.size() + b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) prod[i + j] = (prod[i + j] + std::uint64_t{a[i]} * b[j]) % q;
  }
  const std::size_t deg = e.size() - 1;
  for (std::size_t t = prod.size(); t-- > deg;) {
    const std::uint64_t lead = prod[t];
    if (lead == 0) continue;
    for (std::size_t j = 0; j <= deg; ++j) prod[t - deg + j] = (prod[t - deg + j] + (q - lead) * e[j]) % q;
  }
  Poly out(deg, 0);
  for (std::size_t j = 0; j < deg && j < prod.size(); ++j) out[j] = static_cast<std::uint32_t>(prod[j]);
  return out;
}

// f^(h^i) mod E by h^i - 1 successive multiplications.
Poly oracle_fold(const Poly& f, std::uint64_t power, const Poly& e, std::uint32_t q) {
  Poly acc(e.size() - 1, 0);
  acc[0] = 1;
  for (std::uint64_t t = 0; t < power; ++t) acc = oracle_mulmod(acc, f, e, q);
  return acc;
}

std::uint32_t oracle_eval(const Poly& f, std::uint32_t y, std::uint32_t q) {
  std::uint64_t acc = 0, pw = 1;
  for (std::uint32_t c : f) {
    acc = (acc + c * pw) % q;
    pw = pw * y % q;
  }
  return static_cast<std::uint32_t>(acc);
}

}  // namespace

TEST(GfPoly, IrreducibilityOnQuadratics) {
  // Over F_5 the squares are {0, 1, 4}: Y^2 + 2 has no root, Y^2 + 1 has roots 2 and 3.
  EXPECT_TRUE(gf_is_irreducible({2, 0, 1}, 5));
  EXPECT_FALSE(gf_is_irreducible({1, 0, 1}, 5));
  for (std::uint32_t q : {5u, 7u, 13u}) {
    const GfPoly e = gf_find_irreducible(q, 2);
    for (std::uint32_t y = 0; y < q; ++y) EXPECT_NE(oracle_eval(e, y, q), 0u) << "root " << y;
  }
  // degree 4 over F_3: irreducible iff no factor of degree 1 or 2
  const GfPoly e4 = gf_find_irreducible(3, 4);
  EXPECT_EQ(e4.size(), 5u);
  for (std::uint32_t c0 = 0; c0 < 3; ++c0) {
    for (std::uint32_t c1 = 0; c1 < 3; ++c1) {
      EXPECT_FALSE(gf_trim(gf_mod(e4, {c0, c1, 1}, 3)).empty());
      EXPECT_FALSE(gf_trim(gf_mod(e4, {c0, 1}, 3)).empty());
    }
  }
}

TEST(Guv, ReedSolomonCaseByHand) {
  GuvExpander g(make_guv_params(5, 2, 1, 2));
  EXPECT_EQ(g.neighbor_tuple({2, 3}, 1), (std::vector<std::uint32_t>{1, 0}));
  EXPECT_EQ(g.neighbor_tuple({2, 3}, 2), (std::vector<std::uint32_t>{2, 3}));
}

TEST(Guv, ZeroPolynomialMapsToZeroTuple) {
  GuvExpander g(make_guv_params(7, 2, 3, 2));
  for (std::uint32_t y = 0; y < 7; ++y) EXPECT_EQ(g.neighbor_tuple({0, 0}, y), (std::vector<std::uint32_t>{y, 0, 0, 0}));
}

TEST(Guv, NeighborsMatchIndependentArithmetic) {
  const GuvParams p = make_guv_params(5, 2, 2, 2);
  GuvExpander g(p);
  ASSERT_EQ(g.left_size(), 25u);
  ASSERT_EQ(g.right_size(), 125u);
  for (std::size_t idx = 0; idx < g.left_size(); ++idx) {
    const Poly f = g.left_poly(idx);
    EXPECT_EQ(f, (Poly{static_cast<std::uint32_t>(idx % 5), static_cast<std::uint32_t>(idx / 5)}));
    const auto nb = g.neighbors(idx);
    for (std::uint32_t y = 0; y < 5; ++y) {
      std::vector<std::uint32_t> expect{y};
      std::uint64_t power = 1;
      for (std::uint32_t i = 0; i < p.c; ++i, power *= p.h) expect.push_back(oracle_eval(oracle_fold(f, power, p.irreducible, 5), y, 5));
      EXPECT_EQ(g.neighbor_tuple(f, y), expect);
      EXPECT_EQ(nb[y], g.encode(expect));
      EXPECT_LT(nb[y], g.right_size());
    }
  }
}

TEST(Guv, RejectsBadParameters) {
  EXPECT_THROW(GuvExpander(GuvParams{6, 2, 1, 2, {2, 0, 1}}), std::invalid_argument);
  EXPECT_THROW(GuvExpander(GuvParams{5, 2, 1, 2, {1, 0, 1}}), std::invalid_argument);
  GuvExpander g(make_guv_params(5, 2, 1, 2));
  EXPECT_THROW(g.left_poly(25), std::out_of_range);
  EXPECT_THROW(g.table(26), std::invalid_argument);
}

TEST(Expansion, SingletonsHaveFullDegree) {
  GuvExpander g(make_guv_params(7, 2, 2, 2));
  const auto rep = verify_expansion(g.table(49), 1, 7.0);
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.min_neighborhood, 7u);
  EXPECT_EQ(rep.sets_checked, 49u);
}

TEST(Expansion, GuvBoundHoldsAtHToTheC) {
  // (h^c, q - a h c) = (4, 5) at q=13, a=2, c=2, h=2; first 60 left vertices.
  GuvExpander g(make_guv_params(13, 2, 2, 2));
  const auto rep = verify_expansion(g.table(60), 4, 5.0);
  EXPECT_TRUE(rep.passed);
  EXPECT_GE(rep.min_neighborhood, 20u);
}

TEST(Expansion, ConstantGraphFailsWithWitness) {
  NeighborTable t{5, 3, 4, std::vector<std::uint32_t>(15, 0)};
  const auto rep = verify_expansion(t, 2, 3.0);
  EXPECT_FALSE(rep.passed);
  EXPECT_EQ(rep.min_neighborhood, 1u);
  EXPECT_EQ(rep.witness, (std::vector<std::size_t>{0, 1}));
  EXPECT_THROW(verify_expansion(t, 6, 1.0), std::invalid_argument);
}

TEST(Expansion, RefusesCombinatorialBlowUp) {
  GuvExpander g(make_guv_params(13, 2, 2, 2));
  EXPECT_THROW(verify_expansion(g.table(169), 5, 1.0), std::invalid_argument);
}

TEST(DetHH, CertificateOnDefaultGraph) {
  GuvExpander g(make_guv_params(13, 2, 2, 2));
  const auto cert = certify_det(g.table(169), 0.75, 2.2);
  EXPECT_EQ(cert.expansion.set_size, 3u);
  EXPECT_TRUE(cert.certified);
  EXPECT_LT(2.0 / (1.0 - cert.expansion.zeta), 2.2);
}

TEST(DetHH, OneSparseSpikeIsReturned) {
  GuvExpander g(make_guv_params(13, 2, 2, 2));
  DetHHSketch s(g, 169, 0.75, 2.2);
  EXPECT_EQ(s.list_size(), 5u);
  s.update(101, 7);
  EXPECT_EQ(s.query().front(), 101u);
  EXPECT_EQ(s.estimate(101), 7);
}

TEST(DetHH, UniformVectorDegeneratesToEverything) {
  GuvExpander g(make_guv_params(5, 2, 2, 2));
  DetHHSketch s(g, 25, 0.1, 2.2);
  EXPECT_EQ(s.list_size(), 25u);
  for (std::size_t i = 0; i < 25; ++i) s.update(i, 1);
  const auto out = s.query();
  EXPECT_EQ(std::set<std::size_t>(out.begin(), out.end()).size(), 25u);
}

TEST(DetHH, CountersAndContainmentOnCertifiedGraph) {
  GuvExpander g(make_guv_params(13, 2, 2, 2));
  const NeighborTable t = g.table(169);
  ASSERT_TRUE(certify_det(t, 0.75, 2.2).certified);
  for (int trial = 0; trial < 100; ++trial) {
    DetHHSketch s(t, 0.75, 2.2);
    const auto stream = gen_zipf(169, 0.5 + 0.02 * trial, 400, StreamMode::strict, trial, 0.2);
    s.ingest(stream);
    const ExactVector x = materialize(stream);
    const auto out = s.query();
    for (std::size_t i : exact_heavy_hitters(x.view(), 0.75, 1)) {
      EXPECT_NE(std::find(out.begin(), out.end(), i), out.end());
    }
    for (std::size_t i = 0; i < 169; ++i) EXPECT_GE(s.estimate(i), x[i]);
  }
}

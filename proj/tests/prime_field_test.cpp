#include <gtest/gtest.h>

#include <array>
#include <cstdlib>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sketchrec/poly_hash.hpp"
#include "sketchrec/prime_field.hpp"

using namespace sketchrec;

namespace {

// Plain 128-bit remainder arithmetic, no shared code with PrimeField.
std::uint64_t slow_mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(static_cast<uint128>(a) * b % p);
}

std::uint64_t slow_poly(const std::vector<std::uint64_t>& c, std::uint64_t x, std::uint64_t p) {
  std::uint64_t acc = 0, power = 1;
  for (std::uint64_t coef : c) {
    acc = static_cast<std::uint64_t>((static_cast<uint128>(acc) + slow_mulmod(coef % p, power, p)) % p);
    power = slow_mulmod(power, x % p, p);
  }
  return acc;
}

}  // namespace

TEST(PrimeField, MersenneReductionMatchesRemainder) {
  PrimeField f;
  const std::uint64_t p = f.modulus();
  EXPECT_EQ(p, (std::uint64_t{1} << 61) - 1);
  EXPECT_TRUE(f.is_mersenne());
  Rng rng(11);
  for (int t = 0; t < 20000; ++t) {
    const std::uint64_t a = rng() % p, b = rng() % p;
    EXPECT_EQ(f.mul(a, b), slow_mulmod(a, b, p));
    EXPECT_EQ(f.add(a, b), (a + b) % p);
    EXPECT_EQ(f.sub(a, b), (a + p - b) % p);
    const std::uint64_t raw = rng();
    EXPECT_EQ(f.reduce(raw), raw % p);
  }
}

TEST(PrimeField, EdgeValuesStayInRange) {
  PrimeField f;
  const std::uint64_t top = f.modulus() - 1;
  EXPECT_EQ(f.mul(top, top), 1u);  // (-1)^2
  EXPECT_EQ(f.add(top, 1), 0u);
  EXPECT_EQ(f.neg(0), 0u);
  EXPECT_EQ(f.reduce(f.modulus()), 0u);
  EXPECT_EQ(f.reduce(~std::uint64_t{0}), ~std::uint64_t{0} % f.modulus());
}

TEST(PrimeField, InverseAndPow) {
  for (std::uint64_t p : std::array<std::uint64_t, 4>{5, 7, 65537, PrimeField::kMersenne61}) {
    PrimeField f(p);
    Rng rng(p);
    for (int t = 0; t < 200; ++t) {
      const std::uint64_t a = 1 + rng() % (p - 1);
      EXPECT_EQ(f.mul(a, f.inv(a)), 1u);
      EXPECT_EQ(f.pow(a, p - 1), 1u);  // Fermat
    }
    EXPECT_THROW(f.inv(0), std::domain_error);
  }
}

TEST(PrimeField, RejectsCompositeAndOversizedModuli) {
  EXPECT_THROW(PrimeField(15), std::invalid_argument);
  EXPECT_THROW(PrimeField(1), std::invalid_argument);
  EXPECT_THROW(PrimeField((std::uint64_t{1} << 62) + 135), std::invalid_argument);
  EXPECT_TRUE(is_prime(PrimeField::kMersenne61));
  EXPECT_FALSE(is_prime((std::uint64_t{1} << 61) + 1));
  EXPECT_TRUE(is_prime(2));
  EXPECT_FALSE(is_prime(0));
}

TEST(PolyHash, ConstantPolynomialIsConstant) {
  PolyHash h({3}, 1000, 8);
  for (std::uint64_t i = 0; i < 1000; ++i) EXPECT_EQ(h(i), 3u);
  PolyHash wrap({77}, 100, 10);
  for (std::uint64_t i = 0; i < 100; ++i) EXPECT_EQ(wrap(i), 7u);
}

TEST(PolyHash, IdentityPolynomial) {
  PolyHash h({0, 1}, 100, 4);
  EXPECT_EQ(h.eval(5), 1u);
  PolyHash id({0, 1}, 64, 64);
  for (std::uint64_t i = 0; i < 64; ++i) EXPECT_EQ(id.eval(i), i);
}

TEST(PolyHash, ExactPairwiseUniformityOverF5) {
  PrimeField f5(5);
  std::array<std::array<int, 5>, 5> joint{};
  for (std::uint64_t c0 = 0; c0 < 5; ++c0) {
    for (std::uint64_t c1 = 0; c1 < 5; ++c1) {
      PolyHash h({c0, c1}, 5, 5, f5);
      ++joint[h(0)][h(1)];
    }
  }
  for (const auto& row : joint) {
    for (int count : row) EXPECT_EQ(count, 1);
  }
}

TEST(PolyHash, ExactThreeWiseUniformityOverF7) {
  PrimeField f7(7);
  std::vector<int> joint(343, 0);
  for (std::uint64_t c = 0; c < 343; ++c) {
    PolyHash h({c % 7, c / 7 % 7, c / 49}, 7, 7, f7);
    ++joint[h(1) * 49 + h(4) * 7 + h(6)];
  }
  for (int count : joint) EXPECT_EQ(count, 1);
}

TEST(PolyHash, HornerAgreesWithPowerSumOracle) {
  Rng rng(29);
  const PolyHash h = make_hash(30, 1u << 20, 1009, rng);
  EXPECT_EQ(h.independence(), 30u);
  const std::uint64_t p = h.field().modulus();
  for (int t = 0; t < 2000; ++t) {
    const std::uint64_t i = rng() % (1u << 20);
    EXPECT_EQ(h.field_value(i), slow_poly(h.coefficients(), i, p));
    EXPECT_EQ(h.eval(i), slow_poly(h.coefficients(), i, p) % 1009);
  }
}

TEST(PolyHash, MultipointMatchesPointwise) {
  const PolyHash h = make_hash(17, 5000, 97, 1234);
  EXPECT_TRUE(h.multipoint_eval(10, 0).empty());
  const auto all = h.multipoint_eval(0, 1000);
  ASSERT_EQ(all.size(), 1000u);
  for (std::uint64_t i = 0; i < 1000; ++i) EXPECT_EQ(all[i], h.eval(i));
  const auto tail = h.multipoint_eval(3990, 1010);
  for (std::uint64_t j = 0; j < tail.size(); ++j) EXPECT_EQ(tail[j], h.eval(3990 + j));
  std::vector<std::uint32_t> narrow(1000);
  h.multipoint_eval(4000, narrow);
  for (std::uint64_t j = 0; j < narrow.size(); ++j) EXPECT_EQ(narrow[j], h.eval(4000 + j));

  PolyHash id({0, 1}, 8, 8);
  EXPECT_EQ(id.multipoint_eval(0, 8), (std::vector<std::uint64_t>{0, 1, 2, 3, 4, 5, 6, 7}));
}

TEST(PolyHash, MultipointOnSmallFieldWrapsCorrectly) {
  PrimeField f(101);
  const PolyHash h = make_hash(5, 101, 13, 9, f);
  const auto all = h.multipoint_eval(0, 101);
  for (std::uint64_t i = 0; i < 101; ++i) EXPECT_EQ(all[i], h.eval(i));
}

TEST(PolyHash, DeterministicPerSeedAndInRange) {
  const PolyHash a = make_hash(8, 4096, 37, 555);
  const PolyHash b = make_hash(8, 4096, 37, 555);
  const PolyHash c = make_hash(8, 4096, 37, 556);
  EXPECT_EQ(a.coefficients(), b.coefficients());
  EXPECT_NE(a.coefficients(), c.coefficients());
  for (std::uint64_t i = 0; i < 4096; ++i) EXPECT_LT(a(i), 37u);
}

TEST(PolyHash, RejectsBadParameters) {
  EXPECT_THROW(make_hash(0, 10, 10, 1), std::invalid_argument);
  EXPECT_THROW(make_hash(2, 10, 0, 1), std::invalid_argument);
  EXPECT_THROW(make_hash(2, 11, 3, 1, PrimeField(7)), std::invalid_argument);
  const PolyHash h = make_hash(2, 10, 3, 1);
  EXPECT_THROW(h.eval(10), std::out_of_range);
  EXPECT_THROW(h.multipoint_eval(5, 6), std::out_of_range);
}

TEST(SignHash, OutputsPlusMinusOneBalanced) {
  SignHash s(4, 20000, 3);
  int sum = 0;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const int v = s(i);
    ASSERT_TRUE(v == 1 || v == -1);
    sum += v;
  }
  EXPECT_LT(std::abs(sum), 600);  // about 4 sigma
}

TEST(TabulatedHashes, MatchesDirectEvaluation) {
  TabulatedHashes t(3, 3000, 50, 6, 42);
  EXPECT_EQ(t.rows(), 3u);
  EXPECT_EQ(t.independence(), 6u);
  for (std::size_t r = 0; r < 3; ++r) {
    const PolyHash h = make_hash(6, 3000, 50, derive_seed(42, r));
    for (std::size_t i = 0; i < 3000; ++i) ASSERT_EQ(t(r, i), h.eval(i));
  }
  TabulatedSigns s(2, 500, 4, 7);
  for (std::size_t r = 0; r < 2; ++r) {
    const PolyHash h = make_hash(4, 500, 2, derive_seed(7, r));
    for (std::size_t i = 0; i < 500; ++i) ASSERT_EQ(s(r, i), h.eval(i) == 0 ? -1 : 1);
  }
}

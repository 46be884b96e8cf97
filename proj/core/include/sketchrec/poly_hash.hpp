#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sketchrec/prime_field.hpp"
#include "sketchrec/random.hpp"

namespace sketchrec {

// h(i) = (sum_j c_j i^j mod p) mod B. With t uniform coefficients the family is
// t-wise independent over F_p.
class PolyHash {
 public:
  PolyHash(std::vector<std::uint64_t> coefficients, std::uint64_t domain, std::uint64_t range,
           PrimeField field = PrimeField{});

  std::uint64_t operator()(std::uint64_t i) const { return eval(i); }
  std::uint64_t eval(std::uint64_t i) const;
  std::uint64_t field_value(std::uint64_t i) const;

  // h(first), ..., h(first + count - 1) by forward differences: one field
  // addition per coefficient per point.
  std::vector<std::uint64_t> multipoint_eval(std::uint64_t first, std::uint64_t count) const;
  void multipoint_eval(std::uint64_t first, std::span<std::uint32_t> out) const;

  std::size_t independence() const { return coeffs_.size(); }
  std::uint64_t domain() const { return domain_; }
  std::uint64_t range() const { return range_; }
  const PrimeField& field() const { return field_; }
  const std::vector<std::uint64_t>& coefficients() const { return coeffs_; }

 private:
  template <class Out>
  void tabulate(std::uint64_t first, std::uint64_t count, Out&& emit) const;

  std::vector<std::uint64_t> coeffs_;  // constant term first
  std::uint64_t domain_;
  std::uint64_t range_;
  PrimeField field_;
};

PolyHash make_hash(std::size_t t, std::uint64_t n, std::uint64_t B, Rng& rng, PrimeField field = PrimeField{});
PolyHash make_hash(std::size_t t, std::uint64_t n, std::uint64_t B, std::uint64_t seed,
                   PrimeField field = PrimeField{});

// +-1 from a range-2 polynomial hash.
class SignHash {
 public:
  SignHash(std::size_t t, std::uint64_t n, std::uint64_t seed) : h_(make_hash(t, n, 2, seed)) {}
  int operator()(std::uint64_t i) const { return h_.eval(i) == 0 ? -1 : 1; }
  const PolyHash& hash() const { return h_; }

 private:
  PolyHash h_;
};

// R independent hashes [domain] -> [buckets], evaluated once for the whole domain.
class TabulatedHashes {
 public:
  TabulatedHashes() = default;
  TabulatedHashes(std::size_t rows, std::size_t domain, std::size_t buckets, std::size_t independence,
                  std::uint64_t seed);

  std::uint32_t operator()(std::size_t r, std::size_t i) const { return table_[r * domain_ + i]; }
  std::span<const std::uint32_t> row(std::size_t r) const {
    return {table_.data() + r * domain_, domain_};
  }
  std::size_t rows() const { return rows_; }
  std::size_t domain() const { return domain_; }
  std::size_t buckets() const { return buckets_; }
  std::size_t independence() const { return independence_; }

 private:
  std::size_t rows_ = 0;
  std::size_t domain_ = 0;
  std::size_t buckets_ = 0;
  std::size_t independence_ = 0;
  std::vector<std::uint32_t> table_;
};

// R independent sign hashes, tabulated as +-1 bytes.
class TabulatedSigns {
 public:
  TabulatedSigns() = default;
  TabulatedSigns(std::size_t rows, std::size_t domain, std::size_t independence, std::uint64_t seed);

  int operator()(std::size_t r, std::size_t i) const { return table_[r * domain_ + i]; }
  std::size_t rows() const { return rows_; }

 private:
  std::size_t rows_ = 0;
  std::size_t domain_ = 0;
  std::vector<std::int8_t> table_;
};

}  // namespace sketchrec

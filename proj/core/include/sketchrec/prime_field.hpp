#pragma once

#include <cstdint>

namespace sketchrec {

__extension__ using uint128 = unsigned __int128;

bool is_prime(std::uint64_t n);

// Arithmetic in F_p for a prime p < 2^62. The Mersenne prime 2^61-1 takes a
// shift-and-add reduction path.
class PrimeField {
 public:
  static constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

  explicit PrimeField(std::uint64_t p = kMersenne61);

  std::uint64_t modulus() const { return p_; }
  bool is_mersenne() const { return mersenne_; }

  std::uint64_t reduce(std::uint64_t x) const { return mersenne_ ? reduce61(x) : x % p_; }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + p_ - b; }
  std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : p_ - a; }

  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    uint128 z = static_cast<uint128>(a) * b;
    if (mersenne_) {
      std::uint64_t lo = static_cast<std::uint64_t>(z) & kMersenne61;
      std::uint64_t hi = static_cast<std::uint64_t>(z >> 61);
      return reduce61(lo + hi);
    }
    return static_cast<std::uint64_t>(z % p_);
  }

  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;
  std::uint64_t inv(std::uint64_t a) const;  // throws on zero

 private:
  static std::uint64_t reduce61(std::uint64_t x) {
    x = (x & kMersenne61) + (x >> 61);
    return x >= kMersenne61 ? x - kMersenne61 : x;
  }

  std::uint64_t p_;
  bool mersenne_;
};

}  // namespace sketchrec

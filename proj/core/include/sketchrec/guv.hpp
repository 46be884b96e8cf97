#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sketchrec/stream.hpp"

namespace sketchrec {

// Polynomials over F_q, q < 2^16, coefficients lowest degree first.
using GfPoly = std::vector<std::uint32_t>;

GfPoly gf_trim(GfPoly a);
GfPoly gf_mul_mod(const GfPoly& a, const GfPoly& b, const GfPoly& modulus, std::uint32_t q);
GfPoly gf_mod(GfPoly a, const GfPoly& modulus, std::uint32_t q);
GfPoly gf_pow_mod(GfPoly a, std::uint64_t e, const GfPoly& modulus, std::uint32_t q);
std::uint32_t gf_eval(const GfPoly& f, std::uint32_t y, std::uint32_t q);
bool gf_is_irreducible(const GfPoly& monic, std::uint32_t q);
// First monic irreducible of the given degree in lexicographic coefficient order.
GfPoly gf_find_irreducible(std::uint32_t q, std::uint32_t degree);

struct GuvParams {
  std::uint32_t q = 0;  // prime field size
  std::uint32_t a = 0;  // message length; left vertices are polynomials of degree < a
  std::uint32_t c = 0;  // folded evaluations per neighbor
  std::uint32_t h = 0;  // folding exponent: f_i = f^(h^i) mod E
  GfPoly irreducible;   // E, monic of degree a
};

GuvParams make_guv_params(std::uint32_t q, std::uint32_t a, std::uint32_t c, std::uint32_t h);

// Smallest prime q (with h = 2, c = ceil(log2 K), a = ceil(log_q n_left)) whose
// degree bound q - a h c reaches (1 - zeta) q.
GuvParams instantiate_guv(std::size_t n_left, std::size_t K, double zeta);

struct NeighborTable {
  std::size_t left = 0;
  std::size_t degree = 0;
  std::size_t right = 0;
  std::vector<std::uint32_t> adj;  // left * degree, row-major

  std::uint32_t operator()(std::size_t i, std::size_t d) const { return adj[i * degree + d]; }
};

// Left vertex f gets neighbors (y, f_0(y), ..., f_{c-1}(y)) for y in F_q.
class GuvExpander {
 public:
  explicit GuvExpander(GuvParams params);

  const GuvParams& params() const { return p_; }
  std::size_t left_size() const { return left_; }
  std::size_t degree() const { return p_.q; }
  std::size_t right_size() const { return right_; }

  GfPoly left_poly(std::size_t index) const;
  std::vector<std::uint32_t> neighbor_tuple(const GfPoly& f, std::uint32_t y) const;
  std::size_t encode(const std::vector<std::uint32_t>& tuple) const;
  std::vector<std::size_t> neighbors(std::size_t index) const;
  NeighborTable table(std::size_t n_left) const;

 private:
  GuvParams p_;
  std::size_t left_;
  std::size_t right_;
};

struct ExpansionReport {
  bool passed = false;
  std::size_t set_size = 0;
  std::size_t sets_checked = 0;
  std::size_t min_neighborhood = 0;
  double zeta = 0;                    // 1 - min |N(S)| / (K D)
  std::vector<std::size_t> witness;   // smallest-neighborhood set
};

inline constexpr double kMaxExpansionSets = 1e7;

// Exhaustive check that every K-subset S of the left side has
// |N(S)| >= required_degree * K. Refuses when C(left, K) exceeds 1e7.
ExpansionReport verify_expansion(const NeighborTable& g, std::size_t K, double required_degree);

struct DetCertificate {
  ExpansionReport expansion;
  double c_list = 0;
  bool certified = false;  // 2 / (1 - zeta) < c_list at K = ceil(c_list / eps)
};

DetCertificate certify_det(const NeighborTable& g, double eps, double c_list);

inline constexpr std::size_t kMaxDenseCounters = 10'000'000;

// Count-Min over expander neighborhoods: one counter per right vertex, the
// estimate of x_i is the minimum over its neighbors.
class DetHHSketch {
 public:
  DetHHSketch(const GuvExpander& g, std::size_t n, double eps, double c_list);
  DetHHSketch(NeighborTable table, double eps, double c_list);

  void update(std::size_t i, double delta);
  void ingest(const TurnstileStream& stream);
  double estimate(std::size_t i) const;
  std::vector<std::size_t> query() const;

  std::size_t n() const { return g_.left; }
  std::size_t list_size() const { return list_size_; }
  std::size_t counter_count() const { return counters_.size(); }
  const NeighborTable& graph() const { return g_; }

 private:
  NeighborTable g_;
  std::size_t list_size_;
  std::vector<double> counters_;
};

}  // namespace sketchrec

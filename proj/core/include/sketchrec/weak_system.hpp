#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sketchrec/count_sketch.hpp"
#include "sketchrec/poly_hash.hpp"

namespace sketchrec {

struct WeakIdConstants {
  double c_r = 6.0;          // repetitions = c_r * max(1, ceil(log2(1/delta) / k))
  double c_b = 24.0;         // buckets = c_b k / eps
  double big_cutoff = 8.0;   // buckets with >= big_cutoff * n / B members are skipped
  std::size_t sign_reps = 3; // b-tree level estimate = median over this many signed sums
  std::size_t independence = 8;
};

struct WeakSystemConstants {
  WeakIdConstants id;
  CountSketchConstants est;
  double eta = 1.0;
};

// Hash [n] into B buckets R times; each small bucket runs a binary tree search
// over the positions of its members. Per bucket and sign repetition there is
// one row for the signed bucket total and one per tree level for the members
// whose position has that bit set, so the other child is total minus row.
class WeakIdMatrix {
 public:
  WeakIdMatrix(std::size_t n, std::size_t k, double eps, double delta, std::uint64_t seed, WeakIdConstants c = {});

  std::size_t n() const { return n_; }
  std::size_t reps() const { return reps_; }
  std::size_t buckets() const { return buckets_; }
  std::size_t max_output() const { return 2 * buckets_; }
  std::size_t measurement_count() const { return rows_; }

  void accumulate(std::span<double> y, std::size_t i, double v) const;
  std::vector<double> measure(std::span<const double> x) const;

  bool is_big(std::size_t r, std::size_t b) const { return big_[r * buckets_ + b] != 0; }
  std::uint32_t bucket_of(std::size_t r, std::size_t i) const { return hashes_(r, i); }
  const std::vector<std::uint32_t>& preimage(std::size_t r, std::size_t b) const { return pre_[r * buckets_ + b]; }

  std::optional<std::size_t> identify_bucket(std::span<const double> y, std::size_t r, std::size_t b) const;
  // Indices reported by at least half of the repetitions, ascending.
  std::vector<std::size_t> identify(std::span<const double> y) const;

 private:
  std::size_t levels(std::size_t slot) const;

  std::size_t n_;
  std::size_t reps_;
  std::size_t buckets_;
  std::size_t sign_reps_;
  std::size_t rows_ = 0;
  TabulatedHashes hashes_;
  TabulatedSigns signs_;  // row r * sign_reps + s
  std::vector<std::vector<std::uint32_t>> pre_;
  std::vector<std::uint32_t> rank_;   // r * n + i -> position within its bucket
  std::vector<std::size_t> offset_;   // first row of each (r, b)
  std::vector<char> big_;
};

struct WeakSystemOutput {
  std::vector<std::pair<std::size_t, double>> entries;  // sparse x-hat, ascending index
  std::vector<std::size_t> identified;                  // candidate set before truncation
};

// Identification followed by Count-Sketch estimation on the candidates and
// truncation to the k largest estimates.
class WeakSystem {
 public:
  WeakSystem(std::size_t n, std::size_t k, double zeta, double eps, double delta, std::uint64_t seed,
             WeakSystemConstants c = {});

  std::size_t n() const { return id_.n(); }
  std::size_t k() const { return k_; }
  double zeta() const { return zeta_; }
  double eps() const { return eps_; }
  double delta() const { return delta_; }
  std::size_t measurement_count() const { return id_.measurement_count() + est_.measurement_count(); }
  const WeakIdMatrix& identifier() const { return id_; }
  const CountSketchEst& estimator() const { return est_; }

  void accumulate(std::span<double> y, std::size_t i, double v) const;
  std::vector<double> measure(std::span<const double> x) const;
  WeakSystemOutput recover(std::span<const double> y) const;

 private:
  std::size_t k_;
  double zeta_;
  double eps_;
  double delta_;
  WeakIdMatrix id_;
  CountSketchEst est_;
};

// Smallest |supp(y-hat)| such that x - x_hat = y-hat + z-hat with
// ||z-hat||^2 <= (1 + eta) ||x_{-k}||^2: the largest residual entries go to y-hat.
std::size_t weak_head_miss_count(std::span<const double> x, std::span<const std::pair<std::size_t, double>> xhat,
                                 std::size_t k, double eta);

}  // namespace sketchrec

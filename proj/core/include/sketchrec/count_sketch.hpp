#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sketchrec/poly_hash.hpp"

namespace sketchrec {

struct CountSketchConstants {
  double c_r = 8.0;
  double c_b = 16.0;
  double c_t = 2.0;
  std::size_t independence = 8;
};

struct CountSketchSizing {
  std::size_t rows;
  std::size_t buckets;
  std::size_t capacity;  // largest admissible candidate set
};

// B = c_b (c_t + 1) k / eps, R = c_r (log2(1/eps) + log2(1/delta) / k).
CountSketchSizing cs_sizing(std::size_t k, double eps, double delta, const CountSketchConstants& c);

// Signed bucket sums; the estimate of x_i is the lower median over rows of
// sign * bucket. The measurement vector can live outside the object so the
// same matrix can be applied to residuals.
class CountSketchEst {
 public:
  CountSketchEst(std::size_t n, std::size_t k, double eps, double delta, std::uint64_t seed,
                 CountSketchConstants c = {});
  CountSketchEst(std::size_t n, std::size_t rows, std::size_t buckets, std::size_t capacity, std::uint64_t seed,
                 std::size_t independence = 8);

  std::size_t n() const { return n_; }
  std::size_t rows() const { return rows_; }
  std::size_t buckets() const { return buckets_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t measurement_count() const { return rows_ * buckets_; }

  void accumulate(std::span<double> y, std::size_t i, double v) const;
  std::vector<double> measure(std::span<const double> x) const;
  double estimate_from(std::span<const double> y, std::size_t i) const;
  std::vector<double> estimate_from(std::span<const double> y, std::span<const std::size_t> candidates) const;

  void update(std::size_t i, double v) { accumulate(counters_, i, v); }
  double estimate(std::size_t i) const { return estimate_from(counters_, i); }
  std::vector<double> estimate(std::span<const std::size_t> candidates) const {
    return estimate_from(counters_, candidates);
  }

  std::uint32_t bucket_of(std::size_t r, std::size_t i) const { return hashes_(r, i); }
  int sign_of(std::size_t r, std::size_t i) const { return signs_(r, i); }

 private:
  std::size_t n_;
  std::size_t rows_;
  std::size_t buckets_;
  std::size_t capacity_;
  TabulatedHashes hashes_;
  TabulatedSigns signs_;
  std::vector<double> counters_;
};

// Number of i in T with (x_i - est_i)^2 > eps / (16 k) * ||x_{-k}||^2.
std::size_t count_bad_estimates(std::span<const double> x, std::span<const std::size_t> candidates,
                                std::span<const double> estimates, std::size_t k, double eps);

struct GaussianMedianConstants {
  double c_d = 8.0;
  double c_b = 16.0;
  double c_t = 2.0;
  std::size_t independence = 8;
};

// y_{j,r} = sum over h_r(i) = j of g_{i,r} x_i with standard Gaussian g; the
// estimate of |x_i| is median_r |y_{h_r(i), r}|.
class GaussianMedianSketch {
 public:
  GaussianMedianSketch(std::size_t n, double eps, std::uint64_t seed, GaussianMedianConstants c = {});

  // Pure function of (seed, i, r).
  static double coefficient(std::uint64_t seed, std::size_t i, std::size_t r);

  void update(std::size_t i, double v);
  void add(std::span<const double> x);
  double estimate(std::size_t i) const;
  std::vector<std::size_t> query() const;

  std::size_t n() const { return n_; }
  std::size_t rows() const { return rows_; }
  std::size_t buckets() const { return buckets_; }
  std::size_t list_size() const { return list_size_; }
  std::size_t measurement_count() const { return rows_ * buckets_; }
  std::uint32_t bucket_of(std::size_t r, std::size_t i) const { return hashes_(r, i); }

 private:
  std::size_t n_;
  std::uint64_t seed_;
  std::size_t rows_;
  std::size_t buckets_;
  std::size_t list_size_;
  TabulatedHashes hashes_;
  std::vector<double> y_;
};

struct PartitionConstants {
  double c_buckets = 8.0;  // buckets = c_buckets k / eps
  double c_0 = 4.0;        // output = c_0 k classes
  double rep_factor = 1.0; // repetitions = rep_factor log2 |U|
  std::size_t independence = 8;
};

// Count-Sketch over the classes of a partition of [n]: a class's buckets sum
// signed coordinates of every member.
class PartitionSketch {
 public:
  using Functional = std::vector<std::pair<std::size_t, double>>;

  PartitionSketch(std::vector<std::vector<std::size_t>> classes, std::size_t n, std::size_t k, double eps,
                  std::uint64_t seed, PartitionConstants c = {});
  static PartitionSketch from_labels(const std::vector<std::uint32_t>& class_of, std::size_t num_classes,
                                     std::size_t k, double eps, std::uint64_t seed, PartitionConstants c = {});

  std::size_t n() const { return n_; }
  std::size_t num_classes() const { return classes_.size(); }
  std::size_t rows() const { return rows_; }
  std::size_t buckets() const { return buckets_; }
  std::size_t measurement_count() const { return rows_ * buckets_; }
  std::size_t output_size() const { return output_size_; }
  const std::vector<std::size_t>& members(std::size_t cls) const { return classes_[cls]; }
  std::uint32_t class_of(std::size_t i) const { return class_of_[i]; }

  void update(std::size_t i, double v);
  std::vector<double> measure(std::span<const double> x) const;
  std::vector<Functional> row_functionals() const;

  double class_estimate_from(std::span<const double> y, std::size_t cls) const;
  std::vector<std::size_t> partition_hh_from(std::span<const double> y) const;
  std::vector<std::size_t> partition_hh() const { return partition_hh_from(y_); }

 private:
  std::size_t n_;
  std::vector<std::vector<std::size_t>> classes_;
  std::vector<std::uint32_t> class_of_;
  std::size_t rows_;
  std::size_t buckets_;
  std::size_t output_size_;
  TabulatedHashes class_hashes_;
  TabulatedSigns signs_;
  std::vector<double> y_;
};

}  // namespace sketchrec

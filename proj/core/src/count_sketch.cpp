#include "sketchrec/count_sketch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sketchrec/random.hpp"
#include "sketchrec/select.hpp"
#include "sketchrec/stats.hpp"
#include "sketchrec/stream.hpp"

namespace sketchrec {
namespace {

std::size_t ceil_size(double v) { return static_cast<std::size_t>(std::ceil(v - 1e-9)); }

}  // namespace

CountSketchSizing cs_sizing(std::size_t k, double eps, double delta, const CountSketchConstants& c) {
  if (k == 0) throw std::invalid_argument("cs_sizing: k must be positive");
  if (!(eps > 0 && eps <= 1)) throw std::invalid_argument("cs_sizing: eps must be in (0, 1]");
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("cs_sizing: delta must be in (0, 1)");
  const double kk = static_cast<double>(k);
  CountSketchSizing s{};
  s.buckets = std::max<std::size_t>(1, ceil_size(c.c_b * (c.c_t + 1) * kk / eps));
  s.rows = std::max<std::size_t>(1, ceil_size(c.c_r * (std::log2(1 / eps) + std::log2(1 / delta) / kk)));
  s.capacity = std::max<std::size_t>(1, ceil_size(c.c_t * kk / eps));
  return s;
}

CountSketchEst::CountSketchEst(std::size_t n, std::size_t k, double eps, double delta, std::uint64_t seed,
                               CountSketchConstants c)
    : CountSketchEst(n, cs_sizing(k, eps, delta, c).rows, cs_sizing(k, eps, delta, c).buckets,
                     cs_sizing(k, eps, delta, c).capacity, seed, c.independence) {}

CountSketchEst::CountSketchEst(std::size_t n, std::size_t rows, std::size_t buckets, std::size_t capacity,
                               std::uint64_t seed, std::size_t independence)
    : n_(n), rows_(rows), buckets_(buckets), capacity_(capacity) {
  if (n == 0 || rows == 0 || buckets == 0) throw std::invalid_argument("CountSketchEst: empty dimensions");
  hashes_ = TabulatedHashes(rows, n, buckets, independence, derive_seed(seed, 1));
  signs_ = TabulatedSigns(rows, n, std::max<std::size_t>(2, independence), derive_seed(seed, 2));
  counters_.assign(rows * buckets, 0.0);
}

void CountSketchEst::accumulate(std::span<double> y, std::size_t i, double v) const {
  if (i >= n_) throw std::out_of_range("CountSketchEst: index outside [n]");
  for (std::size_t r = 0; r < rows_; ++r) y[r * buckets_ + hashes_(r, i)] += signs_(r, i) * v;
}

std::vector<double> CountSketchEst::measure(std::span<const double> x) const {
  if (x.size() != n_) throw std::invalid_argument("CountSketchEst::measure: dimension mismatch");
  std::vector<double> y(measurement_count(), 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double* yr = y.data() + r * buckets_;
    auto h = hashes_.row(r);
    for (std::size_t i = 0; i < n_; ++i) {
      if (x[i] != 0) yr[h[i]] += signs_(r, i) * x[i];
    }
  }
  return y;
}

double CountSketchEst::estimate_from(std::span<const double> y, std::size_t i) const {
  if (i >= n_) throw std::out_of_range("CountSketchEst: index outside [n]");
  double buf[256];
  std::vector<double> big;
  double* v = buf;
  if (rows_ > 256) {
    big.resize(rows_);
    v = big.data();
  }
  for (std::size_t r = 0; r < rows_; ++r) v[r] = signs_(r, i) * y[r * buckets_ + hashes_(r, i)];
  return lower_median(std::span<double>(v, rows_));
}

std::vector<double> CountSketchEst::estimate_from(std::span<const double> y,
                                                  std::span<const std::size_t> candidates) const {
  if (candidates.size() > capacity_) throw std::invalid_argument("CountSketchEst: candidate set exceeds capacity");
  std::vector<double> out(candidates.size());
  for (std::size_t j = 0; j < candidates.size(); ++j) out[j] = estimate_from(y, candidates[j]);
  return out;
}

std::size_t count_bad_estimates(std::span<const double> x, std::span<const std::size_t> candidates,
                                std::span<const double> estimates, std::size_t k, double eps) {
  if (candidates.size() != estimates.size()) throw std::invalid_argument("count_bad_estimates: size mismatch");
  const double threshold = eps / (16.0 * static_cast<double>(k)) * tail_energy(x, k);
  std::size_t bad = 0;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const double e = x[candidates[j]] - estimates[j];
    if (e * e > threshold) ++bad;
  }
  return bad;
}

GaussianMedianSketch::GaussianMedianSketch(std::size_t n, double eps, std::uint64_t seed, GaussianMedianConstants c)
    : n_(n), seed_(derive_seed(seed, 3)) {
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("GaussianMedianSketch: eps must be in (0, 1)");
  if (static_cast<double>(n) * eps < 2) throw std::invalid_argument("GaussianMedianSketch: need eps n >= 2");
  rows_ = std::max<std::size_t>(1, ceil_size(c.c_d * std::log2(eps * static_cast<double>(n))));
  buckets_ = std::max<std::size_t>(1, ceil_size(c.c_b / eps));
  list_size_ = ceil_size((c.c_t + 1) / eps);
  hashes_ = TabulatedHashes(rows_, n, buckets_, c.independence, derive_seed(seed, 1));
  y_.assign(rows_ * buckets_, 0.0);
}

double GaussianMedianSketch::coefficient(std::uint64_t seed, std::size_t i, std::size_t r) {
  const std::uint64_t key = derive_seed(seed, i, r);
  const double u1 = 1.0 - unit_from_bits(splitmix64(key));
  const double u2 = unit_from_bits(splitmix64(key ^ 0x632be59bd9b4e019ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void GaussianMedianSketch::update(std::size_t i, double v) {
  if (i >= n_) throw std::out_of_range("GaussianMedianSketch: index outside [n]");
  for (std::size_t r = 0; r < rows_; ++r) y_[r * buckets_ + hashes_(r, i)] += coefficient(seed_, i, r) * v;
}

void GaussianMedianSketch::add(std::span<const double> x) {
  if (x.size() != n_) throw std::invalid_argument("GaussianMedianSketch::add: dimension mismatch");
  for (std::size_t i = 0; i < n_; ++i) {
    if (x[i] != 0) update(i, x[i]);
  }
}

double GaussianMedianSketch::estimate(std::size_t i) const {
  std::vector<double> v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = std::abs(y_[r * buckets_ + hashes_(r, i)]);
  return lower_median(v);
}

std::vector<std::size_t> GaussianMedianSketch::query() const {
  std::vector<std::pair<double, std::size_t>> scored(n_);
  for (std::size_t i = 0; i < n_; ++i) scored[i] = {estimate(i), i};
  return top_by_score(std::move(scored), list_size_);
}

PartitionSketch::PartitionSketch(std::vector<std::vector<std::size_t>> classes, std::size_t n, std::size_t k,
                                 double eps, std::uint64_t seed, PartitionConstants c)
    : n_(n), classes_(std::move(classes)), class_of_(n, UINT32_MAX) {
  if (classes_.empty()) throw std::invalid_argument("PartitionSketch: no classes");
  if (k == 0 || !(eps > 0 && eps <= 1)) throw std::invalid_argument("PartitionSketch: bad k or eps");
  for (std::size_t cls = 0; cls < classes_.size(); ++cls) {
    for (std::size_t i : classes_[cls]) {
      if (i >= n || class_of_[i] != UINT32_MAX) throw std::invalid_argument("PartitionSketch: classes are not a partition of [n]");
      class_of_[i] = static_cast<std::uint32_t>(cls);
    }
  }
  for (auto cls : class_of_) {
    if (cls == UINT32_MAX) throw std::invalid_argument("PartitionSketch: classes are not a partition of [n]");
  }
  const double U = static_cast<double>(classes_.size());
  rows_ = std::max<std::size_t>(1, ceil_size(c.rep_factor * std::log2(std::max(2.0, U))));
  buckets_ = std::max<std::size_t>(1, ceil_size(c.c_buckets * static_cast<double>(k) / eps));
  output_size_ = std::min(classes_.size(), ceil_size(c.c_0 * static_cast<double>(k)));
  class_hashes_ = TabulatedHashes(rows_, classes_.size(), buckets_, c.independence, derive_seed(seed, 1));
  signs_ = TabulatedSigns(rows_, n, std::max<std::size_t>(2, c.independence), derive_seed(seed, 2));
  y_.assign(rows_ * buckets_, 0.0);
}

PartitionSketch PartitionSketch::from_labels(const std::vector<std::uint32_t>& class_of, std::size_t num_classes,
                                             std::size_t k, double eps, std::uint64_t seed, PartitionConstants c) {
  std::vector<std::vector<std::size_t>> classes(num_classes);
  for (std::size_t i = 0; i < class_of.size(); ++i) {
    if (class_of[i] >= num_classes) throw std::invalid_argument("PartitionSketch: label out of range");
    classes[class_of[i]].push_back(i);
  }
  // Empty classes are legal members of the partition's index set.
  return PartitionSketch(std::move(classes), class_of.size(), k, eps, seed, c);
}

void PartitionSketch::update(std::size_t i, double v) {
  if (i >= n_) throw std::out_of_range("PartitionSketch: index outside [n]");
  for (std::size_t r = 0; r < rows_; ++r) y_[r * buckets_ + class_hashes_(r, class_of_[i])] += signs_(r, i) * v;
}

std::vector<double> PartitionSketch::measure(std::span<const double> x) const {
  if (x.size() != n_) throw std::invalid_argument("PartitionSketch::measure: dimension mismatch");
  std::vector<double> y(measurement_count(), 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t i = 0; i < n_; ++i) {
      if (x[i] != 0) y[r * buckets_ + class_hashes_(r, class_of_[i])] += signs_(r, i) * x[i];
    }
  }
  return y;
}

std::vector<PartitionSketch::Functional> PartitionSketch::row_functionals() const {
  std::vector<Functional> rows(measurement_count());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t i = 0; i < n_; ++i) {
      rows[r * buckets_ + class_hashes_(r, class_of_[i])].emplace_back(i, static_cast<double>(signs_(r, i)));
    }
  }
  return rows;
}

double PartitionSketch::class_estimate_from(std::span<const double> y, std::size_t cls) const {
  std::vector<double> v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = std::abs(y[r * buckets_ + class_hashes_(r, cls)]);
  return lower_median(v);
}

std::vector<std::size_t> PartitionSketch::partition_hh_from(std::span<const double> y) const {
  if (y.size() != measurement_count()) throw std::invalid_argument("PartitionSketch: measurement size mismatch");
  std::vector<std::pair<double, std::size_t>> scored(classes_.size());
  for (std::size_t cls = 0; cls < classes_.size(); ++cls) scored[cls] = {class_estimate_from(y, cls), cls};
  return top_by_score(std::move(scored), output_size_);
}

}  // namespace sketchrec

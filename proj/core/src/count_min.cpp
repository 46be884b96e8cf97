#include "sketchrec/count_min.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sketchrec/select.hpp"

namespace sketchrec {
namespace {

void check_eps_delta(double eps, double delta) {
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("eps must be in (0, 1)");
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must be in (0, 1)");
}

std::size_t ceil_size(double v) { return static_cast<std::size_t>(std::ceil(v - 1e-9)); }

}  // namespace

CmSizing cm_sizing(std::size_t m, double eps, double log_inv_delta, std::size_t k, const CmConstants& c) {
  const double lg = std::max(1.0, std::log2(eps * static_cast<double>(m)));
  CmSizing s{};
  s.rows = ceil_size(c.c_r * lg) + ceil_size(eps * log_inv_delta / c.c_delta);
  s.rows = std::max<std::size_t>(s.rows, 1);
  s.buckets = std::max<std::size_t>(1, ceil_size(c.c_b * static_cast<double>(k) / eps));
  s.independence = std::max<std::size_t>(1, ceil_size(c.c_0 / eps));
  s.list_size = ceil_size((c.c_0 + 1) / eps);
  return s;
}

double uniform_log_inv_delta(std::size_t n, double eps) {
  const double s = std::ceil(1.0 / eps - 1e-9);
  const double nn = static_cast<double>(n);
  if (s >= nn) return 0.0;
  return std::lgamma(nn + 1) - std::lgamma(s + 1) - std::lgamma(nn - s + 1);
}

CountMinG3::CountMinG3(std::size_t n, double eps, double delta, std::uint64_t seed, CmConstants c,
                       std::size_t promise_size)
    : CountMinG3(n, eps, (check_eps_delta(eps, delta), std::log(1.0 / delta)), seed, c, promise_size, 0) {}

CountMinG3 CountMinG3::uniform(std::size_t n, double eps, std::uint64_t seed, CmConstants c) {
  check_eps_delta(eps, 0.5);
  return CountMinG3(n, eps, uniform_log_inv_delta(n, eps), seed, c, 0, 0);
}

CountMinG3::CountMinG3(std::size_t n, double eps, double log_inv_delta, std::uint64_t seed, CmConstants c,
                       std::size_t promise_size, int)
    : n_(n), eps_(eps), promise_(promise_size) {
  if (static_cast<double>(n) < 2.0 / eps) throw std::invalid_argument("CountMinG3: need n >= 2/eps");
  if (promise_size > n) throw std::invalid_argument("CountMinG3: promise size exceeds n");
  sizing_ = cm_sizing(promise_size == 0 ? n : promise_size, eps, log_inv_delta, 1, c);
  sizing_.list_size = std::min(sizing_.list_size, n);
  hashes_ = TabulatedHashes(sizing_.rows, n, sizing_.buckets, sizing_.independence, seed);
  counters_.assign(sizing_.rows * sizing_.buckets, 0.0);
}

void CountMinG3::update(std::size_t i, double delta) {
  if (i >= n_) throw std::out_of_range("CountMinG3::update: index outside [n]");
  for (std::size_t r = 0; r < sizing_.rows; ++r) counters_[r * sizing_.buckets + hashes_(r, i)] += delta;
}

void CountMinG3::ingest(const TurnstileStream& stream) {
  if (stream.n != n_) throw std::invalid_argument("CountMinG3::ingest: universe mismatch");
  for (const Update& u : stream.updates) update(u.index, u.delta);
}

double CountMinG3::point_estimate(std::size_t i) const {
  if (i >= n_) throw std::out_of_range("CountMinG3::point_estimate: index outside [n]");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < sizing_.rows; ++r) best = std::min(best, counters_[r * sizing_.buckets + hashes_(r, i)]);
  return best;
}

std::vector<std::size_t> CountMinG3::query() const {
  if (promise_ != 0 && promise_ < n_) throw std::logic_error("CountMinG3::query: promise sketch needs candidates");
  // Row-major sweep keeps the table walk sequential.
  std::vector<double> est(n_, std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < sizing_.rows; ++r) {
    const double* row = counters_.data() + r * sizing_.buckets;
    auto h = hashes_.row(r);
    for (std::size_t i = 0; i < n_; ++i) est[i] = std::min(est[i], row[h[i]]);
  }
  std::vector<std::pair<double, std::size_t>> scored(n_);
  for (std::size_t i = 0; i < n_; ++i) scored[i] = {est[i], i};
  return top_by_score(std::move(scored), sizing_.list_size);
}

std::vector<std::size_t> CountMinG3::query_promise(std::span<const std::size_t> candidates) const {
  if (promise_ != 0 && candidates.size() > promise_) {
    throw std::invalid_argument("CountMinG3::query_promise: candidate set exceeds promise size");
  }
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(candidates.size());
  for (std::size_t i : candidates) scored.emplace_back(point_estimate(i), i);
  return top_by_score(std::move(scored), sizing_.list_size);
}

bool CountMinG3::has_isolating_row() const {
  std::vector<char> used(sizing_.buckets);
  for (std::size_t r = 0; r < sizing_.rows; ++r) {
    std::fill(used.begin(), used.end(), 0);
    bool injective = true;
    for (std::size_t i = 0; i < n_ && injective; ++i) {
      auto b = hashes_(r, i);
      injective = !used[b];
      used[b] = 1;
    }
    if (injective) return true;
  }
  return false;
}

DyadicG3::DyadicG3(std::size_t n, double eps, double delta, std::uint64_t seed, CmConstants c) : n_(n) {
  check_eps_delta(eps, delta);
  if (static_cast<double>(n) < 2.0 / eps) throw std::invalid_argument("DyadicG3: need n >= 2/eps");
  depth_ = static_cast<std::size_t>(std::bit_width(n - 1));
  const double levels = std::max(1.0, std::log2(eps * static_cast<double>(n)));
  level_delta_ = delta / (kLevelBudget * levels);
  CmSizing base = cm_sizing(1, eps, 0, 1, c);
  sizing_ = cm_sizing(2 * base.list_size, eps, std::log(1.0 / level_delta_), 1, c);
  first_level_ = 0;
  while (first_level_ <= depth_ && (std::size_t{1} << first_level_) <= sizing_.list_size) ++first_level_;
  counters_.resize(depth_ + 1);
  if (first_level_ <= depth_) {
    hashes_ = TabulatedHashes(sizing_.rows, std::size_t{1} << depth_, sizing_.buckets, sizing_.independence, seed);
    for (std::size_t l = first_level_; l <= depth_; ++l) counters_[l].assign(sizing_.rows * sizing_.buckets, 0.0);
  }
}

void DyadicG3::update(std::size_t i, double delta) {
  if (i >= n_) throw std::out_of_range("DyadicG3::update: index outside [n]");
  for (std::size_t l = first_level_; l <= depth_; ++l) {
    const std::size_t node = i >> (depth_ - l);
    double* c = counters_[l].data();
    for (std::size_t r = 0; r < sizing_.rows; ++r) c[r * sizing_.buckets + hashes_(r, node)] += delta;
  }
}

void DyadicG3::ingest(const TurnstileStream& stream) {
  if (stream.n != n_) throw std::invalid_argument("DyadicG3::ingest: universe mismatch");
  for (const Update& u : stream.updates) update(u.index, u.delta);
}

double DyadicG3::counter(std::size_t level, std::size_t r, std::size_t b) const {
  if (!has_level(level)) throw std::out_of_range("DyadicG3::counter: level has no sketch");
  return counters_[level][r * sizing_.buckets + b];
}

double DyadicG3::node_estimate(std::size_t level, std::size_t node) const {
  if (!has_level(level)) throw std::out_of_range("DyadicG3::node_estimate: level has no sketch");
  double best = std::numeric_limits<double>::infinity();
  const double* c = counters_[level].data();
  for (std::size_t r = 0; r < sizing_.rows; ++r) best = std::min(best, c[r * sizing_.buckets + hashes_(r, node)]);
  return best;
}

std::vector<std::size_t> DyadicG3::top_nodes(std::size_t level, const std::vector<std::size_t>& nodes) const {
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(nodes.size());
  for (std::size_t v : nodes) scored.emplace_back(node_estimate(level, v), v);
  return top_by_score(std::move(scored), sizing_.list_size);
}

std::vector<std::size_t> DyadicG3::query() const {
  std::vector<std::size_t> out;
  if (first_level_ > depth_) {
    for (std::size_t i = 0; i < n_; ++i) out.push_back(i);
    return out;
  }
  std::vector<std::size_t> frontier(std::size_t{1} << first_level_);
  for (std::size_t v = 0; v < frontier.size(); ++v) frontier[v] = v;
  for (std::size_t l = first_level_;; ++l) {
    std::vector<std::size_t> survivors = top_nodes(l, frontier);
    if (l == depth_) {
      for (std::size_t i : survivors) {
        if (i < n_) out.push_back(i);
      }
      return out;
    }
    frontier.clear();
    for (std::size_t v : survivors) {
      frontier.push_back(2 * v);
      frontier.push_back(2 * v + 1);
    }
  }
}

}  // namespace sketchrec

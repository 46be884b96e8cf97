#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sketchrec/poly_hash.hpp"
#include "sketchrec/stream.hpp"

namespace sketchrec {

struct CmConstants {
  double c_r = 5.0;
  double c_delta = 3.8629436111989061;  // 10 (ln 4 - 1)
  double c_b = 20.0;
  double c_0 = 30.0;
};

struct CmSizing {
  std::size_t rows;
  std::size_t buckets;
  std::size_t independence;
  std::size_t list_size;
};

// Rows = ceil(c_r log2(eps m)) + ceil(eps ln(1/delta) / c_delta), where m is
// the universe size (or the promised candidate-set size).
CmSizing cm_sizing(std::size_t m, double eps, double log_inv_delta, std::size_t k, const CmConstants& c);

// ln C(n, ceil(1/eps)): the failure exponent that makes one sketch work for
// every vector simultaneously.
double uniform_log_inv_delta(std::size_t n, double eps);

class CountMinG3 {
 public:
  // promise_size = 0 sizes for the whole universe; otherwise the query must be
  // restricted to a candidate set of at most promise_size indices.
  CountMinG3(std::size_t n, double eps, double delta, std::uint64_t seed, CmConstants c = {},
             std::size_t promise_size = 0);

  static CountMinG3 uniform(std::size_t n, double eps, std::uint64_t seed, CmConstants c = {});

  void update(std::size_t i, double delta);
  void ingest(const TurnstileStream& stream);

  double point_estimate(std::size_t i) const;
  // Top min(n, list_size) indices by estimate, best first.
  std::vector<std::size_t> query() const;
  std::vector<std::size_t> query_promise(std::span<const std::size_t> candidates) const;

  std::size_t n() const { return n_; }
  std::size_t rows() const { return sizing_.rows; }
  std::size_t buckets() const { return sizing_.buckets; }
  std::size_t independence() const { return sizing_.independence; }
  std::size_t list_size() const { return sizing_.list_size; }
  std::size_t promise_size() const { return promise_; }
  double counter(std::size_t r, std::size_t b) const { return counters_[r * sizing_.buckets + b]; }
  std::uint32_t bucket_of(std::size_t r, std::size_t i) const { return hashes_(r, i); }

  // True when some row is injective on [n]; estimates are then exact.
  bool has_isolating_row() const;

 private:
  CountMinG3(std::size_t n, double eps, double log_inv_delta, std::uint64_t seed, CmConstants c,
             std::size_t promise_size, int);

  std::size_t n_;
  double eps_;
  std::size_t promise_;
  CmSizing sizing_;
  TabulatedHashes hashes_;
  std::vector<double> counters_;
};

// One promise Count-Min per dyadic level; the query walks down the tree
// expanding the children of each level's survivors.
class DyadicG3 {
 public:
  static constexpr double kLevelBudget = 4.0;  // c in delta / (c log(eps n))

  DyadicG3(std::size_t n, double eps, double delta, std::uint64_t seed, CmConstants c = {});

  void update(std::size_t i, double delta);
  void ingest(const TurnstileStream& stream);
  std::vector<std::size_t> query() const;

  std::size_t n() const { return n_; }
  std::size_t depth() const { return depth_; }
  std::size_t first_sketched_level() const { return first_level_; }
  std::size_t list_size() const { return sizing_.list_size; }
  std::size_t rows() const { return sizing_.rows; }
  std::size_t buckets() const { return sizing_.buckets; }
  std::size_t independence() const { return sizing_.independence; }
  double level_delta() const { return level_delta_; }
  bool has_level(std::size_t level) const { return level >= first_level_ && level <= depth_; }
  double counter(std::size_t level, std::size_t r, std::size_t b) const;
  std::uint32_t bucket_of(std::size_t r, std::size_t node) const { return hashes_(r, node); }
  double node_estimate(std::size_t level, std::size_t node) const;

 private:
  std::vector<std::size_t> top_nodes(std::size_t level, const std::vector<std::size_t>& nodes) const;

  std::size_t n_;
  std::size_t depth_;        // leaves live at level depth_, 2^depth_ >= n
  std::size_t first_level_;  // coarser levels keep every node
  double level_delta_;
  CmSizing sizing_;
  TabulatedHashes hashes_;  // shared by all levels; level l uses nodes [0, 2^l)
  std::vector<std::vector<double>> counters_;
};

}  // namespace sketchrec

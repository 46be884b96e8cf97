#include "sketchrec/weak_system.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

#include "sketchrec/random.hpp"
#include "sketchrec/select.hpp"
#include "sketchrec/stats.hpp"
#include "sketchrec/stream.hpp"

namespace sketchrec {
namespace {

std::size_t ceil_size(double v) { return static_cast<std::size_t>(std::ceil(v - 1e-9)); }

std::size_t tree_levels(std::size_t members) {
  return members <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(members - 1));
}

}  // namespace

WeakIdMatrix::WeakIdMatrix(std::size_t n, std::size_t k, double eps, double delta, std::uint64_t seed,
                           WeakIdConstants c)
    : n_(n), sign_reps_(c.sign_reps) {
  if (n == 0 || k == 0) throw std::invalid_argument("WeakIdMatrix: n and k must be positive");
  if (!(eps > 0 && eps <= 1) || !(delta > 0 && delta < 1)) throw std::invalid_argument("WeakIdMatrix: bad eps or delta");
  if (sign_reps_ == 0) throw std::invalid_argument("WeakIdMatrix: need at least one sign repetition");
  const double per_k = std::log2(1.0 / delta) / static_cast<double>(k);
  reps_ = std::max<std::size_t>(1, ceil_size(c.c_r * std::max(1.0, std::ceil(per_k - 1e-9))));
  buckets_ = std::max<std::size_t>(1, ceil_size(c.c_b * static_cast<double>(k) / eps));
  hashes_ = TabulatedHashes(reps_, n, buckets_, c.independence, derive_seed(seed, 1));
  signs_ = TabulatedSigns(reps_ * sign_reps_, n, std::max<std::size_t>(2, c.independence), derive_seed(seed, 2));

  pre_.assign(reps_ * buckets_, {});
  rank_.assign(reps_ * n, 0);
  for (std::size_t r = 0; r < reps_; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      auto& members = pre_[r * buckets_ + hashes_(r, i)];
      rank_[r * n + i] = static_cast<std::uint32_t>(members.size());
      members.push_back(static_cast<std::uint32_t>(i));
    }
  }
  const double cutoff = c.big_cutoff * static_cast<double>(n) / static_cast<double>(buckets_);
  big_.assign(reps_ * buckets_, 0);
  offset_.assign(reps_ * buckets_, 0);
  for (std::size_t slot = 0; slot < pre_.size(); ++slot) {
    big_[slot] = static_cast<double>(pre_[slot].size()) >= cutoff;
    offset_[slot] = rows_;
    if (!big_[slot] && !pre_[slot].empty()) rows_ += sign_reps_ * (levels(slot) + 1);
  }
}

std::size_t WeakIdMatrix::levels(std::size_t slot) const { return tree_levels(pre_[slot].size()); }

void WeakIdMatrix::accumulate(std::span<double> y, std::size_t i, double v) const {
  if (i >= n_) throw std::out_of_range("WeakIdMatrix: index outside [n]");
  for (std::size_t r = 0; r < reps_; ++r) {
    const std::size_t slot = r * buckets_ + hashes_(r, i);
    if (big_[slot]) continue;
    const std::size_t L = levels(slot);
    const std::uint32_t pos = rank_[r * n_ + i];
    for (std::size_t s = 0; s < sign_reps_; ++s) {
      const double sv = signs_(r * sign_reps_ + s, i) * v;
      double* row = y.data() + offset_[slot] + s * (L + 1);
      row[0] += sv;
      for (std::size_t l = 0; l < L; ++l) {
        if ((pos >> (L - 1 - l)) & 1u) row[1 + l] += sv;
      }
    }
  }
}

std::vector<double> WeakIdMatrix::measure(std::span<const double> x) const {
  if (x.size() != n_) throw std::invalid_argument("WeakIdMatrix::measure: dimension mismatch");
  std::vector<double> y(rows_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    if (x[i] != 0) accumulate(y, i, x[i]);
  }
  return y;
}

std::optional<std::size_t> WeakIdMatrix::identify_bucket(std::span<const double> y, std::size_t r,
                                                         std::size_t b) const {
  const std::size_t slot = r * buckets_ + b;
  const auto& members = pre_[slot];
  if (members.empty() || big_[slot]) return std::nullopt;
  const std::size_t L = levels(slot);
  const double* base = y.data() + offset_[slot];
  const std::size_t width = sign_reps_ * (L + 1);
  if (std::all_of(base, base + width, [](double v) { return v == 0; })) return std::nullopt;
  std::vector<double> one(sign_reps_), zero(sign_reps_);
  std::size_t pos = 0;
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t s = 0; s < sign_reps_; ++s) {
      const double total = base[s * (L + 1)];
      const double set = base[s * (L + 1) + 1 + l];
      one[s] = std::abs(set);
      zero[s] = std::abs(total - set);
    }
    const bool bit = lower_median(one) > lower_median(zero);
    pos = (pos << 1) | static_cast<std::size_t>(bit);
  }
  if (pos >= members.size()) return std::nullopt;
  return members[pos];
}

std::vector<std::size_t> WeakIdMatrix::identify(std::span<const double> y) const {
  if (y.size() != rows_) throw std::invalid_argument("WeakIdMatrix::identify: measurement size mismatch");
  std::map<std::size_t, std::size_t> votes;
  for (std::size_t r = 0; r < reps_; ++r) {
    for (std::size_t b = 0; b < buckets_; ++b) {
      if (auto i = identify_bucket(y, r, b)) ++votes[*i];
    }
  }
  std::vector<std::size_t> out;
  for (auto [i, count] : votes) {
    if (2 * count >= reps_) out.push_back(i);
  }
  return out;
}

namespace {

CountSketchEst make_estimator(std::size_t n, std::size_t k, double eps, double delta, std::uint64_t seed,
                              const WeakSystemConstants& c, std::size_t candidates) {
  CountSketchConstants est = c.est;
  est.c_t = std::max(est.c_t, static_cast<double>(candidates) * eps / static_cast<double>(k));
  CountSketchSizing s = cs_sizing(k, eps, delta, est);
  return CountSketchEst(n, s.rows, s.buckets, std::max(s.capacity, candidates), seed, est.independence);
}

}  // namespace

WeakSystem::WeakSystem(std::size_t n, std::size_t k, double zeta, double eps, double delta, std::uint64_t seed,
                       WeakSystemConstants c)
    : k_(k),
      zeta_(zeta),
      eps_(eps),
      delta_(delta),
      id_(n, k, eps, delta / 2, derive_seed(seed, 11), c.id),
      est_(make_estimator(n, k, eps, delta / 2, derive_seed(seed, 12), c, 2 * id_.buckets())) {
  if (!(zeta > 0 && zeta <= 1)) throw std::invalid_argument("WeakSystem: zeta must be in (0, 1]");
}

void WeakSystem::accumulate(std::span<double> y, std::size_t i, double v) const {
  const std::size_t m = id_.measurement_count();
  id_.accumulate(y.subspan(0, m), i, v);
  est_.accumulate(y.subspan(m), i, v);
}

std::vector<double> WeakSystem::measure(std::span<const double> x) const {
  std::vector<double> y = id_.measure(x);
  std::vector<double> e = est_.measure(x);
  y.insert(y.end(), e.begin(), e.end());
  return y;
}

WeakSystemOutput WeakSystem::recover(std::span<const double> y) const {
  if (y.size() != measurement_count()) throw std::invalid_argument("WeakSystem::recover: measurement size mismatch");
  const std::size_t m = id_.measurement_count();
  WeakSystemOutput out;
  out.identified = id_.identify(y.subspan(0, m));
  const std::vector<double> est = est_.estimate_from(y.subspan(m), out.identified);
  std::vector<std::pair<double, std::size_t>> scored;
  std::map<std::size_t, double> value;
  for (std::size_t j = 0; j < est.size(); ++j) {
    if (est[j] == 0) continue;
    scored.emplace_back(std::abs(est[j]), out.identified[j]);
    value[out.identified[j]] = est[j];
  }
  std::vector<std::size_t> keep = top_by_score(std::move(scored), k_);
  std::sort(keep.begin(), keep.end());
  for (std::size_t i : keep) out.entries.emplace_back(i, value[i]);
  return out;
}

std::size_t weak_head_miss_count(std::span<const double> x, std::span<const std::pair<std::size_t, double>> xhat,
                                 std::size_t k, double eta) {
  std::vector<double> e(x.begin(), x.end());
  for (auto [i, v] : xhat) e[i] -= v;
  const double budget = (1 + eta) * tail_energy(x, k);
  std::vector<double> sq(e.size());
  double total = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    sq[i] = e[i] * e[i];
    total += sq[i];
  }
  std::sort(sq.begin(), sq.end(), std::greater<>());
  std::size_t moved = 0;
  while (total > budget && moved < sq.size()) total -= sq[moved++];
  return moved;
}

}  // namespace sketchrec

#include "sketchrec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "sketchrec/random.hpp"
#include "sketchrec/select.hpp"

namespace sketchrec {
namespace {

std::size_t ceil_size(double v) { return static_cast<std::size_t>(std::ceil(v - 1e-9)); }

std::size_t ceil_log3(std::size_t k) {
  std::size_t p = 0;
  for (std::size_t v = 1; v < k; v *= 3) ++p;
  return p;
}

std::size_t ceil_div_pow3(std::size_t k, std::size_t i) {
  std::size_t d = 1;
  for (std::size_t j = 0; j < i && d < k; ++j) d *= 3;
  return std::max<std::size_t>(1, (k + d - 1) / d);
}

}  // namespace

Schedule parse_schedule(const std::string& s) {
  if (s == "quadratic") return Schedule::quadratic;
  if (s == "fast") return Schedule::fast;
  throw std::invalid_argument("unknown schedule: " + s);
}

const char* to_string(Schedule s) { return s == Schedule::quadratic ? "quadratic" : "fast"; }

WeakSystemConstants pipeline_weak_defaults(Schedule schedule) {
  WeakSystemConstants c;
  c.id.c_r = 1.0;
  c.id.c_b = schedule == Schedule::quadratic ? 1.25 : 1.0;
  c.id.big_cutoff = 8.0;
  c.id.sign_reps = 1;
  c.est.c_r = 1.0;
  c.est.c_b = 0.6;
  c.est.c_t = 2.0;
  return c;
}

std::vector<LevelSpec> quadratic_schedule(std::size_t k, double eps, const PipelineConstants& c) {
  if (k == 0) throw std::invalid_argument("quadratic_schedule: k must be positive");
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("quadratic_schedule: eps must be in (0, 1)");
  const std::size_t levels = ceil_log3(k) + 1;
  const double lg = std::log2(static_cast<double>(k));
  const double early = lg > 1 ? c.phase_c * std::log2(lg) : static_cast<double>(levels);
  const double late_delta = lg > 1 ? std::exp(-static_cast<double>(k) / (lg * lg * lg)) : 0.5;
  std::vector<LevelSpec> out;
  for (std::size_t i = 0; i < levels; ++i) {
    LevelSpec s{ceil_div_pow3(k, i), 1.0 / 3.0, 0, 0};
    if (static_cast<double>(i + 1) <= early) {
      s.eps = eps / std::ldexp(1.0, static_cast<int>(i));
      s.delta = std::exp(-c.fail_c * static_cast<double>(s.k));
    } else {
      s.eps = eps / std::max(1.0, lg);
      s.delta = late_delta;
    }
    out.push_back(s);
  }
  return out;
}

std::vector<LevelSpec> fast_schedule(std::size_t k, double eps, const PipelineConstants& c) {
  if (k == 0) throw std::invalid_argument("fast_schedule: k must be positive");
  const double root = std::sqrt(static_cast<double>(k));
  const auto requested = static_cast<std::size_t>(std::floor(c.fast_c / 2 * std::log2(static_cast<double>(k))));
  std::vector<LevelSpec> out;
  for (std::size_t i = 0; i < requested; ++i) {
    const double ki = static_cast<double>(k) / std::pow(3.0, static_cast<double>(i));
    if (ki <= root) break;
    out.push_back({ceil_div_pow3(k, i), 1.0 / 3.0, eps / std::ldexp(1.0, static_cast<int>(i)),
                   std::exp(-c.fail_c * ki)});
  }
  // The terminal machine continues the geometric decrease of eps.
  const double terminal_eps = eps / std::ldexp(1.0, static_cast<int>(out.size()));
  std::vector<LevelSpec> tail = quadratic_schedule(ceil_size(root), terminal_eps, c);
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

SparseRecoveryPipeline::SparseRecoveryPipeline(std::size_t n, std::size_t k, double eps, Schedule schedule,
                                               std::uint64_t seed, PipelineConstants c)
    : n_(n), k_(k), eps_(eps), schedule_(schedule) {
  if (k > n) throw std::invalid_argument("SparseRecoveryPipeline: k exceeds n");
  specs_ = schedule == Schedule::quadratic ? quadratic_schedule(k, eps, c) : fast_schedule(k, eps, c);
  systems_.reserve(specs_.size());
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const LevelSpec& s = specs_[i];
    systems_.emplace_back(n, s.k, s.zeta, s.eps, s.delta, derive_seed(seed, 100 + i),
                          schedule == Schedule::quadratic ? c.weak : c.fast_weak);
  }
}

std::size_t SparseRecoveryPipeline::measurement_count() const {
  std::size_t m = 0;
  for (const auto& w : systems_) m += w.measurement_count();
  return m;
}

std::vector<std::vector<double>> SparseRecoveryPipeline::measure(std::span<const double> x) const {
  std::vector<std::vector<double>> y;
  y.reserve(systems_.size());
  for (const auto& w : systems_) y.push_back(w.measure(x));
  return y;
}

PipelineResult SparseRecoveryPipeline::recover(std::vector<std::vector<double>> y, bool keep_residuals) const {
  if (y.size() != systems_.size()) throw std::invalid_argument("SparseRecoveryPipeline::recover: level count mismatch");
  PipelineResult result;
  std::map<std::size_t, double> total;
  for (std::size_t i = 0; i < systems_.size(); ++i) {
    LevelTrace trace{specs_[i], systems_[i].measurement_count(), {}, {}};
    if (keep_residuals) trace.residual = y[i];
    trace.found = systems_[i].recover(y[i]).entries;
    // W_j (x - r) = W_j x - W_j r for every later level j.
    for (std::size_t j = i + 1; j < systems_.size(); ++j) {
      for (auto [idx, v] : trace.found) systems_[j].accumulate(y[j], idx, -v);
    }
    for (auto [idx, v] : trace.found) total[idx] += v;
    result.levels.push_back(std::move(trace));
  }
  for (auto [idx, v] : total) {
    if (v != 0) result.xhat.emplace_back(idx, v);
  }
  return result;
}

double pipeline_row_reference(std::size_t n, std::size_t k, double eps) {
  const double ke = static_cast<double>(k) / eps;
  return ke * std::log2(static_cast<double>(n) / (eps * static_cast<double>(k)));
}

SpikedRecovery::SpikedRecovery(std::size_t n, std::size_t k, double eps, double delta, std::uint64_t seed,
                               SpikedConstants c)
    : n_(n),
      k_(k),
      mu_(std::sqrt(eps / static_cast<double>(k))),
      gamma_(std::min(0.25, c.alpha * std::sqrt((1 + c.eta) * (1 - static_cast<double>(k) / static_cast<double>(n))))),
      sketch_(n,
              std::max<std::size_t>(1, ceil_size(c.c_r * (std::log2(std::max(1.0, eps * static_cast<double>(n) / static_cast<double>(k))) +
                                                           std::log2(1 / delta) / static_cast<double>(k)))),
              std::max<std::size_t>(1, ceil_size(c.c_b * (c.c_t + 1) * static_cast<double>(k) / eps)), n, seed,
              c.independence) {
  if (k == 0 || k > n) throw std::invalid_argument("SpikedRecovery: need 1 <= k <= n");
  if (!(eps > 0 && eps < 1) || !(delta > 0 && delta < 1)) throw std::invalid_argument("SpikedRecovery: bad eps or delta");
}

SparseEntries SpikedRecovery::recover(std::span<const double> y) const {
  std::vector<std::pair<double, std::size_t>> scored;
  std::vector<double> est(n_);
  const double lo = window_lo(), hi = window_hi();
  for (std::size_t i = 0; i < n_; ++i) {
    est[i] = sketch_.estimate_from(y, i);
    const double a = std::abs(est[i]);
    if (a >= lo && a <= hi) scored.emplace_back(a, i);
  }
  std::vector<std::size_t> keep = top_by_score(std::move(scored), k_);
  std::sort(keep.begin(), keep.end());
  SparseEntries out;
  for (std::size_t i : keep) out.emplace_back(i, est[i]);
  return out;
}

double spiked_row_reference(std::size_t n, std::size_t k, double eps, double delta) {
  return static_cast<double>(k) / eps * std::log2(eps * static_cast<double>(n) / static_cast<double>(k)) +
         std::log2(1 / delta) / eps;
}

double recovery_error(std::span<const double> x, std::span<const std::pair<std::size_t, double>> xhat) {
  std::vector<double> e(x.begin(), x.end());
  for (auto [i, v] : xhat) e[i] -= v;
  double err = 0;
  for (double v : e) err += v * v;
  return err;
}

}  // namespace sketchrec

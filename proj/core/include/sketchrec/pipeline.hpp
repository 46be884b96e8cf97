#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sketchrec/count_sketch.hpp"
#include "sketchrec/weak_system.hpp"

namespace sketchrec {

enum class Schedule { quadratic, fast };

Schedule parse_schedule(const std::string& s);
const char* to_string(Schedule s);

struct LevelSpec {
  std::size_t k;
  double zeta;
  double eps;
  double delta;
};

// Weak-system constants used inside the pipelines. They are smaller than the
// standalone defaults so that the stacked row count stays near
// (k/eps) log(n/(eps k)). The fast schedule's terminal levels run at smaller
// eps, so it gets narrower identification.
WeakSystemConstants pipeline_weak_defaults(Schedule schedule);

struct PipelineConstants {
  double phase_c = 3.0;    // early levels while i <= phase_c * log2 log2 k
  double fail_c = 0.125;   // early-level failure target exp(-fail_c * k_i)
  double fast_c = 2.0;     // fast schedule runs floor(fast_c / 2 * log2 k) weak levels (clamped)
  WeakSystemConstants weak = pipeline_weak_defaults(Schedule::quadratic);
  WeakSystemConstants fast_weak = pipeline_weak_defaults(Schedule::fast);
};

// Level i = 0, 1, ...: (ceil(k / 3^i), 1/3, eps / 2^i) early, eps / log2 k late.
std::vector<LevelSpec> quadratic_schedule(std::size_t k, double eps, const PipelineConstants& c = {});
// Weak levels while k / 3^i > sqrt(k), then the quadratic schedule at K = ceil(sqrt(k))
// and eps / 2^(weak levels).
std::vector<LevelSpec> fast_schedule(std::size_t k, double eps, const PipelineConstants& c = {});

using SparseEntries = std::vector<std::pair<std::size_t, double>>;

struct LevelTrace {
  LevelSpec spec;
  std::size_t rows = 0;
  SparseEntries found;           // r^(i)
  std::vector<double> residual;  // W_i (x - sum_{j<i} r^(j)) as maintained by subtraction
};

struct PipelineResult {
  SparseEntries xhat;  // ascending index
  std::vector<LevelTrace> levels;
};

class SparseRecoveryPipeline {
 public:
  SparseRecoveryPipeline(std::size_t n, std::size_t k, double eps, Schedule schedule, std::uint64_t seed,
                         PipelineConstants c = {});

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  double eps() const { return eps_; }
  Schedule schedule() const { return schedule_; }
  std::size_t level_count() const { return systems_.size(); }
  const LevelSpec& level(std::size_t i) const { return specs_[i]; }
  const WeakSystem& system(std::size_t i) const { return systems_[i]; }
  std::size_t measurement_count() const;

  std::vector<std::vector<double>> measure(std::span<const double> x) const;
  PipelineResult recover(std::vector<std::vector<double>> y, bool keep_residuals = false) const;

 private:
  std::size_t n_;
  std::size_t k_;
  double eps_;
  Schedule schedule_;
  std::vector<LevelSpec> specs_;
  std::vector<WeakSystem> systems_;
};

// (k/eps) log2(n/(eps k)): the row budget the pipelines are compared against.
double pipeline_row_reference(std::size_t n, std::size_t k, double eps);

// Lean sizing: (c_b (c_t + 1) k / eps) buckets times c_r log2(eps n / k) rows
// stays within a small multiple of the spiked-model row bound.
struct SpikedConstants {
  double c_r = 1.0;
  double c_b = 2.0;
  double c_t = 2.0;
  double alpha = 0.25;
  double eta = 0.1;
  std::size_t independence = 8;
};

// Count-Sketch estimates of every coordinate, kept when the magnitude lies in
// [(1 - gamma) mu, (1 + gamma) mu] with mu = sqrt(eps / k), then top k.
class SpikedRecovery {
 public:
  SpikedRecovery(std::size_t n, std::size_t k, double eps, double delta, std::uint64_t seed, SpikedConstants c = {});

  std::size_t measurement_count() const { return sketch_.measurement_count(); }
  std::size_t rows() const { return sketch_.rows(); }
  std::size_t buckets() const { return sketch_.buckets(); }
  double gamma() const { return gamma_; }
  double window_lo() const { return (1 - gamma_) * mu_; }
  double window_hi() const { return (1 + gamma_) * mu_; }

  std::vector<double> measure(std::span<const double> x) const { return sketch_.measure(x); }
  SparseEntries recover(std::span<const double> y) const;

 private:
  std::size_t n_;
  std::size_t k_;
  double mu_;
  double gamma_;
  CountSketchEst sketch_;
};

// (k/eps) log2(eps n / k) + (1/eps) log2(1/delta)
double spiked_row_reference(std::size_t n, std::size_t k, double eps, double delta);

// ||x - xhat||_2^2 for a sparse xhat.
double recovery_error(std::span<const double> x, std::span<const std::pair<std::size_t, double>> xhat);

}  // namespace sketchrec

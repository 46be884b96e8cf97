#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sketchrec/random.hpp"
#include "sketchrec/stats.hpp"

namespace sketchrec {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Flat key=value configuration. Known keys: algorithm, trials, seed, dist,
// out, min_success; everything else is an algorithm parameter.
struct ExperimentConfig {
  std::string algorithm;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::string dist;  // empty selects the algorithm's default input family
  std::string out;
  double min_success = -1;  // negative selects the algorithm's default threshold
  std::map<std::string, std::string> params;

  bool has(const std::string& key) const { return params.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Routes the reserved keys to their fields.
  void set(const std::string& key, const std::string& value);
  // Sorted key=value lines; parse_config(to_text()) reproduces the config.
  std::string to_text() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

struct TrialReport {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool success = false;
  double metric = 0;  // e.g. ||x - x_hat||^2 or missed heavy hitters
  double bound = 0;   // the threshold metric is compared against
  std::size_t measurements = 0;
  std::size_t rounds = 0;
  double wall_ms = 0;
  std::vector<std::pair<std::string, double>> extras;

  // Throws std::out_of_range when the experiment did not record `name`.
  double extra(const std::string& name) const;
};

// What an experiment fixes before its trials run.
struct PreparedExperiment {
  std::vector<std::string> notes;    // header lines, e.g. sizes or certificates
  double default_min_success = 0.95;
  std::function<TrialReport(std::uint64_t seed)> trial;
};

struct Experiment {
  std::string id;
  std::string description;
  std::function<PreparedExperiment(const ExperimentConfig&)> prepare;
};

void register_experiment(Experiment e);
const Experiment* find_experiment(const std::string& id);
std::vector<std::string> experiment_ids();

inline std::uint64_t trial_seed(std::uint64_t base, std::size_t trial) { return splitmix64(base + trial); }

struct AggregateReport {
  ExperimentConfig config;
  std::vector<std::string> notes;
  std::vector<TrialReport> trials;
  std::size_t successes = 0;
  double min_success = 0;
  Interval success_ci{0, 1};  // 95% Wilson
  double total_ms = 0;

  std::size_t failures() const { return trials.size() - successes; }
  double success_rate() const { return trials.empty() ? 0 : static_cast<double>(successes) / trials.size(); }
  bool threshold_met() const;
};

// Throws ConfigError for an unknown algorithm id or malformed parameters.
AggregateReport run(const ExperimentConfig& config);

// Per-trial rows with a commented header; wall time is left out so that
// reruns of one config produce identical bytes.
void write_csv(std::ostream& out, const AggregateReport& report);
std::string summary_line(const AggregateReport& report);
inline int exit_code(const AggregateReport& report) { return report.threshold_met() ? 0 : 1; }

struct SweepPoint {
  std::string value;
  AggregateReport report;
};

std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& key,
                                  const std::vector<std::string>& values);
// Whitespace table: value trials successes rate wilson_lo wilson_hi mean_metric mean_measurements.
void write_gnuplot_table(std::ostream& out, const std::string& key, const std::vector<SweepPoint>& sweep);

}  // namespace sketchrec

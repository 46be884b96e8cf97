#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sketchrec/count_sketch.hpp"
#include "sketchrec/random.hpp"

namespace sketchrec {

struct Functional {
  std::vector<std::uint32_t> index;
  std::vector<double> coeff;
};

class RoundDisciplineError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Wraps a hidden signal. Measurements submitted during a round are answered
// only when the round ends, so no query can depend on a result from its own
// round.
class MeasurementOracle {
 public:
  using Ticket = std::size_t;

  explicit MeasurementOracle(std::span<const double> x);

  std::size_t n() const { return x_.size(); }
  Ticket submit(std::span<const std::uint32_t> index, std::span<const double> coeff);
  Ticket submit(const Functional& f) { return submit(f.index, f.coeff); }
  Ticket observe(std::size_t i);
  void end_round();

  bool released(Ticket t) const { return t < released_; }
  double value(Ticket t) const;

  std::size_t measurements() const { return values_.size(); }
  std::size_t rounds() const { return rounds_; }
  std::size_t pending() const { return values_.size() - released_; }
  std::size_t violations() const { return violations_; }

 private:
  std::span<const double> x_;
  std::vector<double> values_;
  std::size_t released_ = 0;
  std::size_t rounds_ = 0;
  mutable std::size_t violations_ = 0;
};

// Punctured Hadamard code: bit a (1 <= a < 2^m) of message u is <a, u> mod 2.
class BinaryCode {
 public:
  explicit BinaryCode(std::size_t message_bits);

  std::size_t message_bits() const { return m_; }
  std::size_t length() const { return (std::size_t{1} << m_) - 1; }
  bool bit(std::size_t message, std::size_t j) const;  // j in [0, length)
  std::vector<char> encode(std::size_t message) const;
  // Nearest codeword by exhaustive search, ties to the smaller message.
  std::size_t decode(std::span<const char> received) const;
  std::size_t min_distance() const;

 private:
  std::size_t m_;
};

struct OneSparseConstants {
  double alpha = 1.0;        // message bits = ceil(alpha log2 log2 n)
  std::size_t majority = 1;  // measurement pairs per code bit
  double window = 0.25;      // keep |u_i - u_hat| <= window / B^2 (circular)
  double b0 = 2.0;
};

// Preconditioning round followed by shrinking rounds. Many instances advance
// in lockstep against one oracle.
class OneSparseRecovery {
 public:
  OneSparseRecovery(std::vector<std::uint32_t> universe, std::uint64_t seed, OneSparseConstants c = {});

  bool done() const { return stage_ == Stage::done; }
  void submit(MeasurementOracle& oracle);
  void consume(const MeasurementOracle& oracle);
  std::optional<std::size_t> result() const;
  std::size_t rounds_used() const { return rounds_; }
  std::size_t message_bits() const { return bits_; }
  std::size_t candidates() const { return set_.size(); }
  const std::vector<std::uint32_t>& candidate_set() const { return set_; }

 private:
  enum class Stage { precondition, shrink, done };

  void submit_precondition(MeasurementOracle& oracle);
  void consume_precondition(const MeasurementOracle& oracle);
  void submit_shrink(MeasurementOracle& oracle);
  void consume_shrink(const MeasurementOracle& oracle);

  std::size_t n_;
  Rng rng_;
  OneSparseConstants c_;
  Stage stage_;
  std::size_t bits_ = 0;
  std::size_t index_bits_ = 0;
  std::vector<std::uint32_t> set_;   // current candidates S (shuffled order during precondition)
  std::vector<double> u_;
  double B_;
  bool retried_ = false;
  std::size_t rounds_ = 0;
  std::vector<MeasurementOracle::Ticket> tickets_;
};

void run_lockstep(MeasurementOracle& oracle, std::vector<OneSparseRecovery>& instances);
std::optional<std::size_t> one_sparse_recover(MeasurementOracle& oracle, std::vector<std::uint32_t> universe,
                                              std::uint64_t seed, OneSparseConstants c = {});

using SparseEntries = std::vector<std::pair<std::size_t, double>>;

struct AdaptiveConstants {
  double c_prime = 2.0;  // buckets = c_prime k_r / eps_r
  double c = 1.0;        // repetition constant
  double gamma = 0.2;
  OneSparseConstants one;
};

struct PhaseRecord {
  int phase;
  std::size_t step;
  double k;
  double eps;
  std::size_t reps;
  std::size_t buckets;
  std::size_t measurements;
  std::size_t rounds;
  std::size_t found;
};

struct AdaptiveResult {
  SparseEntries xhat;  // observed values, ascending index
  std::vector<PhaseRecord> table;
  std::size_t measurements = 0;
  std::size_t rounds = 0;
  std::size_t violations = 0;
};

// 2^^r with 2^^0 = 1.
double tetration2(std::size_t r);
std::size_t log_star(double x);

struct PhaseStep {
  int phase;
  double k;
  double eps;
  std::size_t reps;
};
std::vector<PhaseStep> adaptive_schedule(std::size_t k, double eps, const AdaptiveConstants& c = {});

AdaptiveResult adaptive_k_recover(MeasurementOracle& oracle, std::size_t k, double eps, std::uint64_t seed,
                                  AdaptiveConstants c = {});

struct LowSparsityConstants {
  double class_power = 3.0;  // classes = ceil(log2(n)^class_power)
  PartitionConstants partition;
  OneSparseConstants one;
};

// Requires k / eps <= log2(n)^4.
AdaptiveResult adaptive_low_sparsity(MeasurementOracle& oracle, std::size_t k, double eps, std::uint64_t seed,
                                     LowSparsityConstants c = {});

std::string format_phase_table(const std::vector<PhaseRecord>& table);

}  // namespace sketchrec

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sketchrec {

enum class StreamMode { strict, general };

const char* to_string(StreamMode mode);
StreamMode parse_stream_mode(const std::string& s);

struct Update {
  std::size_t index;
  double delta;
};

struct TurnstileStream {
  std::size_t n = 0;
  StreamMode mode = StreamMode::general;
  std::vector<Update> updates;
};

// Thrown by materialize when a strict stream drives a coordinate negative.
class StrictViolation : public std::runtime_error {
 public:
  StrictViolation(std::size_t position, std::size_t index);
  std::size_t position() const { return position_; }  // 1-based update position
  std::size_t index() const { return index_; }

 private:
  std::size_t position_;
  std::size_t index_;
};

class ExactVector {
 public:
  ExactVector() = default;
  explicit ExactVector(std::size_t n) : v_(n, 0.0) {}
  explicit ExactVector(std::vector<double> v) : v_(std::move(v)) {}

  std::size_t size() const { return v_.size(); }
  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }
  std::span<const double> view() const { return v_; }
  std::span<double> view() { return v_; }
  const std::vector<double>& values() const { return v_; }
  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }

  double norm1() const;
  double norm2_sq() const;

 private:
  std::vector<double> v_;
};

ExactVector materialize(const TurnstileStream& stream);

// {i : |x_i|^p >= eps * ||x||_p^p, x_i != 0}, ascending.
std::vector<std::size_t> exact_heavy_hitters(std::span<const double> x, double eps, int p);

// Indices ordered by decreasing |x_i|, ties to the lower index.
std::vector<std::size_t> magnitude_order(std::span<const double> x);

struct HeadTail {
  std::vector<std::size_t> head;  // top-k by magnitude
  std::vector<double> tail;       // x with head zeroed
  double tail_norm1 = 0;
  double tail_norm2_sq = 0;
};
HeadTail head_tail(std::span<const double> x, std::size_t k);

// ||x_{-k}||_2^2
double tail_energy(std::span<const double> x, std::size_t k);

// H_{k,eps}(x) = {i : x_i^2 >= (eps/k) ||x_{-k}||_2^2, x_i != 0}, ascending.
std::vector<std::size_t> head_eps(std::span<const double> x, std::size_t k, double eps);

// Zipf-distributed item frequencies with item 0 the most frequent. In strict
// mode deletions remove a previously inserted unit, so every prefix stays
// non-negative; in general mode deletions hit Zipf-drawn items unconditionally.
TurnstileStream gen_zipf(std::size_t n, double exponent, std::size_t length, StreamMode mode, std::uint64_t seed,
                         double deletion_rate = 0.0);

struct PlantedSignal {
  ExactVector x;
  std::vector<std::size_t> support;  // planted positions
  std::vector<double> planted;       // planted values, aligned with support
};

// x = y + z, y with k entries of magnitude sqrt(eps/k) and random signs,
// z iid N(0, 1/n) (omitted when with_noise is false).
PlantedSignal gen_spiked(std::size_t n, std::size_t k, double eps, std::uint64_t seed, bool with_noise = true);

// k entries of magnitude head_scale * (j+1)^-alpha plus iid N(0, tail_sigma^2) everywhere.
PlantedSignal gen_power_law(std::size_t n, std::size_t k, double alpha, double head_scale, double tail_sigma,
                            std::uint64_t seed);

// k entries of magnitude head_value plus iid N(0, tail_sigma^2) everywhere.
PlantedSignal gen_planted(std::size_t n, std::size_t k, double head_value, double tail_sigma, std::uint64_t seed);

// Exactly k-sparse, magnitudes uniform in [1, 2], random signs.
PlantedSignal gen_sparse(std::size_t n, std::size_t k, std::uint64_t seed);

// Text format: header "n=<int> mode=<strict|general>", then one "i delta" per line.
void write_stream(std::ostream& out, const TurnstileStream& stream);
TurnstileStream read_stream(std::istream& in);
void save_stream(const std::string& path, const TurnstileStream& stream);
TurnstileStream load_stream(const std::string& path);

// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace sketchrec

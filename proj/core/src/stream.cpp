#include "sketchrec/stream.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "sketchrec/random.hpp"

namespace sketchrec {

const char* to_string(StreamMode mode) { return mode == StreamMode::strict ? "strict" : "general"; }

StreamMode parse_stream_mode(const std::string& s) {
  if (s == "strict") return StreamMode::strict;
  if (s == "general") return StreamMode::general;
  throw std::invalid_argument("unknown stream mode: " + s);
}

StrictViolation::StrictViolation(std::size_t position, std::size_t index)
    : std::runtime_error("strict stream violated at update " + std::to_string(position) + " (index " +
                         std::to_string(index) + ")"),
      position_(position),
      index_(index) {}

double ExactVector::norm1() const {
  double s = 0;
  for (double v : v_) s += std::abs(v);
  return s;
}

double ExactVector::norm2_sq() const {
  double s = 0;
  for (double v : v_) s += v * v;
  return s;
}

ExactVector materialize(const TurnstileStream& stream) {
  ExactVector x(stream.n);
  for (std::size_t t = 0; t < stream.updates.size(); ++t) {
    const Update& u = stream.updates[t];
    if (u.index >= stream.n) throw std::out_of_range("materialize: update index outside [n]");
    x[u.index] += u.delta;
    if (stream.mode == StreamMode::strict && x[u.index] < 0) throw StrictViolation(t + 1, u.index);
  }
  return x;
}

std::vector<std::size_t> exact_heavy_hitters(std::span<const double> x, double eps, int p) {
  if (!(eps > 0 && eps <= 1)) throw std::invalid_argument("exact_heavy_hitters: eps must be in (0, 1]");
  if (p != 1 && p != 2) throw std::invalid_argument("exact_heavy_hitters: p must be 1 or 2");
  auto pw = [p](double v) { return p == 1 ? std::abs(v) : v * v; };
  double norm = 0;
  for (double v : x) norm += pw(v);
  const double threshold = eps * norm;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0 && pw(x[i]) >= threshold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> magnitude_order(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return std::abs(x[a]) > std::abs(x[b]); });
  return idx;
}

HeadTail head_tail(std::span<const double> x, std::size_t k) {
  HeadTail ht;
  std::vector<std::size_t> order = magnitude_order(x);
  ht.head.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(k, x.size())));
  ht.tail.assign(x.begin(), x.end());
  for (std::size_t i : ht.head) ht.tail[i] = 0;
  for (double v : ht.tail) {
    ht.tail_norm1 += std::abs(v);
    ht.tail_norm2_sq += v * v;
  }
  return ht;
}

double tail_energy(std::span<const double> x, std::size_t k) {
  if (k == 0) {
    double s = 0;
    for (double v : x) s += v * v;
    return s;
  }
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = x[i] * x[i];
  if (k >= sq.size()) return 0;
  std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(k), sq.end(), std::greater<>());
  double s = 0;
  for (std::size_t i = k; i < sq.size(); ++i) s += sq[i];
  return s;
}

std::vector<std::size_t> head_eps(std::span<const double> x, std::size_t k, double eps) {
  if (k == 0) throw std::invalid_argument("head_eps: k must be positive");
  const double threshold = eps / static_cast<double>(k) * tail_energy(x, k);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0 && x[i] * x[i] >= threshold) out.push_back(i);
  }
  return out;
}

TurnstileStream gen_zipf(std::size_t n, double exponent, std::size_t length, StreamMode mode, std::uint64_t seed,
                         double deletion_rate) {
  if (n == 0) throw std::invalid_argument("gen_zipf: n must be positive");
  if (!(exponent > 0)) throw std::invalid_argument("gen_zipf: exponent must be positive");
  if (!(deletion_rate >= 0 && deletion_rate < 1)) throw std::invalid_argument("gen_zipf: deletion_rate in [0,1)");
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = std::pow(static_cast<double>(j + 1), -exponent);
  std::discrete_distribution<std::size_t> item(w.begin(), w.end());
  std::bernoulli_distribution del(deletion_rate);
  Rng rng(seed);

  TurnstileStream s;
  s.n = n;
  s.mode = mode;
  s.updates.reserve(length);
  std::vector<std::size_t> live;  // one entry per inserted, not yet deleted unit
  while (s.updates.size() < length) {
    if (deletion_rate > 0 && del(rng)) {
      if (mode == StreamMode::general) {
        s.updates.push_back({item(rng), -1.0});
        continue;
      }
      if (!live.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
        std::size_t slot = pick(rng);
        s.updates.push_back({live[slot], -1.0});
        live[slot] = live.back();
        live.pop_back();
        continue;
      }
    }
    std::size_t i = item(rng);
    s.updates.push_back({i, 1.0});
    if (mode == StreamMode::strict) live.push_back(i);
  }
  return s;
}

namespace {

std::vector<std::size_t> random_support(std::size_t n, std::size_t k, Rng& rng) {
  if (k > n) throw std::invalid_argument("support size exceeds n");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t j = 0; j < k; ++j) {
    std::uniform_int_distribution<std::size_t> pick(j, n - 1);
    std::swap(idx[j], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

void add_gaussian(ExactVector& x, double sigma, Rng& rng) {
  if (sigma <= 0) return;
  std::normal_distribution<double> g(0.0, sigma);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += g(rng);
}

double random_sign(Rng& rng) { return (rng() & 1) ? 1.0 : -1.0; }

}  // namespace

PlantedSignal gen_spiked(std::size_t n, std::size_t k, double eps, std::uint64_t seed, bool with_noise) {
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("gen_spiked: eps must be in (0, 1)");
  if (k == 0) throw std::invalid_argument("gen_spiked: k must be positive");
  Rng rng(seed);
  PlantedSignal s{ExactVector(n), random_support(n, k, rng), {}};
  const double mag = std::sqrt(eps / static_cast<double>(k));
  for (std::size_t j = 0; j < k; ++j) s.planted.push_back(mag * random_sign(rng));
  if (with_noise) add_gaussian(s.x, 1.0 / std::sqrt(static_cast<double>(n)), rng);
  for (std::size_t j = 0; j < k; ++j) s.x[s.support[j]] += s.planted[j];
  return s;
}

PlantedSignal gen_power_law(std::size_t n, std::size_t k, double alpha, double head_scale, double tail_sigma,
                            std::uint64_t seed) {
  Rng rng(seed);
  PlantedSignal s{ExactVector(n), random_support(n, k, rng), {}};
  for (std::size_t j = 0; j < k; ++j) {
    s.planted.push_back(head_scale * std::pow(static_cast<double>(j + 1), -alpha) * random_sign(rng));
  }
  add_gaussian(s.x, tail_sigma, rng);
  for (std::size_t j = 0; j < k; ++j) s.x[s.support[j]] += s.planted[j];
  return s;
}

PlantedSignal gen_planted(std::size_t n, std::size_t k, double head_value, double tail_sigma, std::uint64_t seed) {
  return gen_power_law(n, k, 0.0, head_value, tail_sigma, seed);
}

PlantedSignal gen_sparse(std::size_t n, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  PlantedSignal s{ExactVector(n), random_support(n, k, rng), {}};
  std::uniform_real_distribution<double> mag(1.0, 2.0);
  for (std::size_t j = 0; j < k; ++j) {
    s.planted.push_back(mag(rng) * random_sign(rng));
    s.x[s.support[j]] = s.planted[j];
  }
  return s;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_stream(std::ostream& out, const TurnstileStream& stream) {
  out << "n=" << stream.n << " mode=" << to_string(stream.mode) << '\n';
  for (const Update& u : stream.updates) out << u.index << ' ' << format_double(u.delta) << '\n';
}

TurnstileStream read_stream(std::istream& in) {
  TurnstileStream s;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_stream: missing header");
  {
    std::istringstream hs(line);
    std::string a, b;
    hs >> a >> b;
    if (a.rfind("n=", 0) != 0 || b.rfind("mode=", 0) != 0) throw std::runtime_error("read_stream: bad header");
    s.n = std::stoull(a.substr(2));
    s.mode = parse_stream_mode(b.substr(5));
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    Update u{};
    auto r1 = std::from_chars(p, end, u.index);
    if (r1.ec != std::errc{} || r1.ptr == end || *r1.ptr != ' ') {
      throw std::runtime_error("read_stream: bad update on line " + std::to_string(lineno));
    }
    auto r2 = std::from_chars(r1.ptr + 1, end, u.delta);
    if (r2.ec != std::errc{} || r2.ptr != end) {
      throw std::runtime_error("read_stream: bad update on line " + std::to_string(lineno));
    }
    if (u.index >= s.n) throw std::runtime_error("read_stream: index outside [n] on line " + std::to_string(lineno));
    s.updates.push_back(u);
  }
  return s;
}

void save_stream(const std::string& path, const TurnstileStream& stream) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_stream: cannot open " + path);
  write_stream(out, stream);
}

TurnstileStream load_stream(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_stream: cannot open " + path);
  return read_stream(in);
}

}  // namespace sketchrec

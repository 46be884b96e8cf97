#include "sketchrec/adaptive.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "sketchrec/stream.hpp"

namespace sketchrec {
namespace {

std::size_t ceil_size(double v) { return static_cast<std::size_t>(std::ceil(v - 1e-9)); }

double circular_distance(double a, double b) {
  double d = std::abs(a - b);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

}  // namespace

MeasurementOracle::MeasurementOracle(std::span<const double> x) : x_(x) {}

MeasurementOracle::Ticket MeasurementOracle::submit(std::span<const std::uint32_t> index,
                                                    std::span<const double> coeff) {
  if (index.size() != coeff.size()) throw std::invalid_argument("MeasurementOracle: index/coeff size mismatch");
  double v = 0;
  for (std::size_t j = 0; j < index.size(); ++j) {
    if (index[j] >= x_.size()) throw std::out_of_range("MeasurementOracle: index outside [n]");
    v += coeff[j] * x_[index[j]];
  }
  values_.push_back(v);
  return values_.size() - 1;
}

MeasurementOracle::Ticket MeasurementOracle::observe(std::size_t i) {
  const std::uint32_t idx = static_cast<std::uint32_t>(i);
  const double one = 1.0;
  return submit(std::span<const std::uint32_t>(&idx, 1), std::span<const double>(&one, 1));
}

void MeasurementOracle::end_round() {
  if (released_ == values_.size()) return;
  released_ = values_.size();
  ++rounds_;
}

double MeasurementOracle::value(Ticket t) const {
  if (t >= values_.size()) throw std::out_of_range("MeasurementOracle: unknown ticket");
  if (!released(t)) {
    ++violations_;
    throw RoundDisciplineError("MeasurementOracle: result read before its round ended");
  }
  return values_[t];
}

BinaryCode::BinaryCode(std::size_t message_bits) : m_(message_bits) {
  if (m_ == 0 || m_ > 20) throw std::invalid_argument("BinaryCode: message bits must be in [1, 20]");
}

bool BinaryCode::bit(std::size_t message, std::size_t j) const {
  return std::popcount(message & (j + 1)) & 1;
}

std::vector<char> BinaryCode::encode(std::size_t message) const {
  std::vector<char> w(length());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = bit(message, j);
  return w;
}

std::size_t BinaryCode::decode(std::span<const char> received) const {
  if (received.size() != length()) throw std::invalid_argument("BinaryCode::decode: wrong length");
  std::size_t best = 0, best_dist = SIZE_MAX;
  for (std::size_t u = 0; u < (std::size_t{1} << m_); ++u) {
    std::size_t d = 0;
    for (std::size_t j = 0; j < received.size(); ++j) d += (received[j] != 0) != bit(u, j);
    if (d < best_dist) {
      best_dist = d;
      best = u;
    }
  }
  return best;
}

std::size_t BinaryCode::min_distance() const {
  std::size_t best = SIZE_MAX;
  const std::size_t words = std::size_t{1} << m_;
  for (std::size_t u = 0; u < words; ++u) {
    for (std::size_t v = u + 1; v < words; ++v) {
      std::size_t d = 0;
      for (std::size_t j = 0; j < length(); ++j) d += bit(u, j) != bit(v, j);
      best = std::min(best, d);
    }
  }
  return best;
}

OneSparseRecovery::OneSparseRecovery(std::vector<std::uint32_t> universe, std::uint64_t seed, OneSparseConstants c)
    : n_(universe.size()), rng_(seed), c_(c), stage_(Stage::shrink), set_(std::move(universe)),
      B_(c.b0) {
  if (n_ <= 1) {
    stage_ = Stage::done;
    return;
  }
  index_bits_ = static_cast<std::size_t>(std::bit_width(n_ - 1));
  const double ll = std::log2(std::log2(static_cast<double>(n_)));
  if (ll > 0) bits_ = std::min(index_bits_, ceil_size(c_.alpha * ll));
  if (bits_ > 0) {
    std::shuffle(set_.begin(), set_.end(), rng_);
    stage_ = Stage::precondition;
  }
}

void OneSparseRecovery::submit(MeasurementOracle& oracle) {
  tickets_.clear();
  if (stage_ == Stage::precondition) submit_precondition(oracle);
  else if (stage_ == Stage::shrink) submit_shrink(oracle);
  if (!tickets_.empty()) ++rounds_;
}

void OneSparseRecovery::consume(const MeasurementOracle& oracle) {
  if (stage_ == Stage::precondition) consume_precondition(oracle);
  else if (stage_ == Stage::shrink) consume_shrink(oracle);
}

void OneSparseRecovery::submit_precondition(MeasurementOracle& oracle) {
  const BinaryCode code(bits_);
  const std::size_t shift = index_bits_ - bits_;
  std::vector<std::uint32_t> idx[2];
  std::vector<double> coef[2];
  for (std::size_t j = 0; j < code.length(); ++j) {
    // The split depends only on the code bit; the signs are fresh per repetition.
    for (int s = 0; s < 2; ++s) idx[s].clear();
    for (std::size_t p = 0; p < set_.size(); ++p) idx[code.bit(p >> shift, j)].push_back(set_[p]);
    for (std::size_t t = 0; t < c_.majority; ++t) {
      for (int s = 0; s < 2; ++s) {
        coef[s].resize(idx[s].size());
        std::uint64_t word = 0;
        for (std::size_t q = 0; q < coef[s].size(); ++q) {
          if ((q & 63) == 0) word = rng_();
          coef[s][q] = 1.0 - 2.0 * static_cast<double>((word >> (q & 63)) & 1);
        }
        tickets_.push_back(oracle.submit(idx[s], coef[s]));
      }
    }
  }
}

void OneSparseRecovery::consume_precondition(const MeasurementOracle& oracle) {
  const BinaryCode code(bits_);
  std::vector<char> received(code.length());
  std::size_t q = 0;
  for (std::size_t j = 0; j < code.length(); ++j) {
    std::size_t ones = 0;
    for (std::size_t t = 0; t < c_.majority; ++t, q += 2) {
      ones += std::abs(oracle.value(tickets_[q + 1])) > std::abs(oracle.value(tickets_[q]));
    }
    received[j] = 2 * ones > c_.majority;
  }
  const std::size_t message = code.decode(received);
  const std::size_t shift = index_bits_ - bits_;
  std::vector<std::uint32_t> kept;
  for (std::size_t p = 0; p < set_.size(); ++p) {
    if ((p >> shift) == message) kept.push_back(set_[p]);
  }
  set_ = std::move(kept);
  stage_ = set_.size() <= 1 ? Stage::done : Stage::shrink;
}

void OneSparseRecovery::submit_shrink(MeasurementOracle& oracle) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  u_.resize(set_.size());
  std::vector<double> sig(set_.size()), weighted(set_.size());
  for (std::size_t j = 0; j < set_.size(); ++j) {
    u_[j] = unit(rng_);
    sig[j] = (rng_() & 1) ? 1.0 : -1.0;
    weighted[j] = sig[j] * u_[j];
  }
  tickets_.push_back(oracle.submit(set_, sig));
  tickets_.push_back(oracle.submit(set_, weighted));
}

void OneSparseRecovery::consume_shrink(const MeasurementOracle& oracle) {
  const double y1 = oracle.value(tickets_[0]);
  const double y2 = oracle.value(tickets_[1]);
  if (y1 == 0) {
    if (retried_) {
      set_.clear();
      stage_ = Stage::done;
    }
    retried_ = true;
    return;
  }
  retried_ = false;
  const double u_hat = y2 / y1;
  const double w = c_.window / (B_ * B_);
  std::vector<std::uint32_t> kept;
  for (std::size_t j = 0; j < set_.size(); ++j) {
    if (circular_distance(u_[j], u_hat) <= w) kept.push_back(set_[j]);
  }
  set_ = std::move(kept);
  // Past B >= n the loop keeps shrinking until the window drops below the
  // resolution of u, so tiny universes still end with a single survivor.
  const bool exhausted = w < 0x1p-60;
  B_ = std::pow(B_, 1.5);
  if (set_.size() <= 1 || exhausted) stage_ = Stage::done;
}

std::optional<std::size_t> OneSparseRecovery::result() const {
  if (!done() || set_.size() != 1) return std::nullopt;
  return set_.front();
}

void run_lockstep(MeasurementOracle& oracle, std::vector<OneSparseRecovery>& instances) {
  for (;;) {
    bool any = false;
    for (auto& inst : instances) {
      if (!inst.done()) {
        inst.submit(oracle);
        any = true;
      }
    }
    if (!any) return;
    oracle.end_round();
    for (auto& inst : instances) {
      if (!inst.done()) inst.consume(oracle);
    }
  }
}

std::optional<std::size_t> one_sparse_recover(MeasurementOracle& oracle, std::vector<std::uint32_t> universe,
                                              std::uint64_t seed, OneSparseConstants c) {
  std::vector<OneSparseRecovery> inst;
  inst.emplace_back(std::move(universe), seed, c);
  run_lockstep(oracle, inst);
  return inst.front().result();
}

double tetration2(std::size_t r) {
  double v = 1;
  for (std::size_t j = 0; j < r; ++j) v = std::exp2(v);
  return v;
}

std::size_t log_star(double x) {
  std::size_t r = 0;
  while (x > 1) {
    x = std::log2(x);
    ++r;
  }
  return r;
}

std::vector<PhaseStep> adaptive_schedule(std::size_t k, double eps, const AdaptiveConstants& c) {
  if (k == 0 || !(eps > 0 && eps < 1)) throw std::invalid_argument("adaptive_schedule: bad k or eps");
  if (!(c.gamma > 0 && c.gamma < 0.5)) throw std::invalid_argument("adaptive_schedule: gamma must be in (0, 1/2)");
  const double kk = static_cast<double>(k);
  const double lg = std::max(1.0, std::log2(kk));
  std::vector<PhaseStep> out;
  const std::size_t p1 = std::max<std::size_t>(1, ceil_size(std::log2(lg)));
  for (std::size_t r = 0; r < p1; ++r) {
    out.push_back({1, kk / std::ldexp(1.0, static_cast<int>(r)), eps * std::pow(0.75, static_cast<double>(r)),
                   ceil_size(c.c)});
  }
  const std::size_t p2 = log_star(std::pow(kk, c.gamma));
  for (std::size_t r = 0; r <= p2; ++r) {
    out.push_back({2, kk / (tetration2(r) * lg), eps, ceil_size(c.c * lg)});
  }
  const std::size_t T = ceil_size(1.0 / c.gamma) - 1;
  for (std::size_t r = 0; r <= T; ++r) {
    const double g = T == 0 ? c.gamma
                            : (1 - c.gamma) - (1 - 2 * c.gamma) * static_cast<double>(r) / static_cast<double>(T);
    out.push_back({3, std::pow(kk, g), eps, ceil_size(c.c * std::pow(kk, 1 - g))});
  }
  return out;
}

namespace {

struct RecoveryState {
  MeasurementOracle& oracle;
  std::vector<std::uint32_t> universe;  // unobserved coordinates, ascending
  std::map<std::size_t, double> found;
  Rng rng;
};

// Observe every new candidate in one round and drop it from the universe.
std::size_t observe_candidates(RecoveryState& st, const std::set<std::size_t>& candidates) {
  std::vector<std::pair<std::size_t, MeasurementOracle::Ticket>> pending;
  for (std::size_t i : candidates) {
    if (!st.found.count(i)) pending.emplace_back(i, st.oracle.observe(i));
  }
  st.oracle.end_round();
  for (auto [i, t] : pending) st.found[i] = st.oracle.value(t);
  std::vector<std::uint32_t> rest;
  for (auto i : st.universe) {
    if (!st.found.count(i)) rest.push_back(i);
  }
  st.universe = std::move(rest);
  return pending.size();
}

std::set<std::size_t> recover_groups(RecoveryState& st, std::vector<std::vector<std::uint32_t>> groups,
                                     const OneSparseConstants& c) {
  std::vector<OneSparseRecovery> inst;
  for (auto& g : groups) {
    if (!g.empty()) inst.emplace_back(std::move(g), st.rng(), c);
  }
  run_lockstep(st.oracle, inst);
  std::set<std::size_t> out;
  for (const auto& r : inst) {
    if (auto i = r.result()) out.insert(*i);
  }
  return out;
}

void hash_and_recover(RecoveryState& st, const PhaseStep& step, std::size_t index, const AdaptiveConstants& c,
                      std::vector<PhaseRecord>& table) {
  const std::size_t m0 = st.oracle.measurements(), r0 = st.oracle.rounds();
  const std::size_t buckets = std::max<std::size_t>(1, ceil_size(c.c_prime * step.k / step.eps));
  std::vector<std::vector<std::uint32_t>> groups;
  if (!st.universe.empty()) {
    for (std::size_t rep = 0; rep < step.reps; ++rep) {
      std::vector<std::vector<std::uint32_t>> g(buckets);
      std::uniform_int_distribution<std::size_t> pick(0, buckets - 1);
      for (auto i : st.universe) g[pick(st.rng)].push_back(i);
      for (auto& v : g) {
        if (!v.empty()) groups.push_back(std::move(v));
      }
    }
  }
  std::set<std::size_t> cand = recover_groups(st, std::move(groups), c.one);
  const std::size_t added = observe_candidates(st, cand);
  table.push_back({step.phase, index, step.k, step.eps, step.reps, buckets, st.oracle.measurements() - m0,
                   st.oracle.rounds() - r0, added});
}

AdaptiveResult finish(RecoveryState& st, std::vector<PhaseRecord> table) {
  AdaptiveResult res;
  for (auto [i, v] : st.found) res.xhat.emplace_back(i, v);
  res.table = std::move(table);
  res.measurements = st.oracle.measurements();
  res.rounds = st.oracle.rounds();
  res.violations = st.oracle.violations();
  return res;
}

std::vector<std::uint32_t> full_universe(std::size_t n) {
  std::vector<std::uint32_t> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = static_cast<std::uint32_t>(i);
  return u;
}

}  // namespace

AdaptiveResult adaptive_k_recover(MeasurementOracle& oracle, std::size_t k, double eps, std::uint64_t seed,
                                  AdaptiveConstants c) {
  RecoveryState st{oracle, full_universe(oracle.n()), {}, Rng(seed)};
  std::vector<PhaseRecord> table;
  const std::vector<PhaseStep> steps = adaptive_schedule(k, eps, c);
  std::map<int, std::size_t> step_in_phase;
  for (const PhaseStep& s : steps) hash_and_recover(st, s, step_in_phase[s.phase]++, c, table);
  return finish(st, std::move(table));
}

AdaptiveResult adaptive_low_sparsity(MeasurementOracle& oracle, std::size_t k, double eps, std::uint64_t seed,
                                     LowSparsityConstants c) {
  const std::size_t n = oracle.n();
  const double lg = std::log2(static_cast<double>(n));
  if (k == 0 || !(eps > 0 && eps < 1)) throw std::invalid_argument("adaptive_low_sparsity: bad k or eps");
  if (static_cast<double>(k) / eps > std::pow(lg, 4)) {
    throw std::invalid_argument("adaptive_low_sparsity: requires k/eps <= log^4 n");
  }
  RecoveryState st{oracle, full_universe(n), {}, Rng(seed)};
  const std::size_t classes = std::min(n, std::max<std::size_t>(2, ceil_size(std::pow(lg, c.class_power))));
  std::vector<std::uint32_t> label(n);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(classes - 1));
  for (auto& l : label) l = pick(st.rng);
  PartitionSketch sketch = PartitionSketch::from_labels(label, classes, k, eps, st.rng(), c.partition);

  std::vector<PhaseRecord> table;
  const std::size_t m0 = oracle.measurements(), r0 = oracle.rounds();
  std::vector<MeasurementOracle::Ticket> tickets;
  Functional f;
  for (const auto& row : sketch.row_functionals()) {
    f.index.clear();
    f.coeff.clear();
    for (auto [i, v] : row) {
      f.index.push_back(static_cast<std::uint32_t>(i));
      f.coeff.push_back(v);
    }
    tickets.push_back(oracle.submit(f));
  }
  oracle.end_round();
  std::vector<double> y(tickets.size());
  for (std::size_t j = 0; j < tickets.size(); ++j) y[j] = oracle.value(tickets[j]);
  const std::vector<std::size_t> heavy = sketch.partition_hh_from(y);
  table.push_back({0, 0, static_cast<double>(k), eps, sketch.rows(), sketch.buckets(), oracle.measurements() - m0,
                   oracle.rounds() - r0, heavy.size()});

  const std::size_t m1 = oracle.measurements(), r1 = oracle.rounds();
  std::vector<std::vector<std::uint32_t>> groups;
  for (std::size_t cls : heavy) {
    std::vector<std::uint32_t> g;
    for (std::size_t i : sketch.members(cls)) g.push_back(static_cast<std::uint32_t>(i));
    groups.push_back(std::move(g));
  }
  std::set<std::size_t> cand = recover_groups(st, std::move(groups), c.one);
  const std::size_t added = observe_candidates(st, cand);
  table.push_back({1, 0, static_cast<double>(k), eps, 1, heavy.size(), oracle.measurements() - m1,
                   oracle.rounds() - r1, added});
  return finish(st, std::move(table));
}

std::string format_phase_table(const std::vector<PhaseRecord>& table) {
  std::ostringstream out;
  out << "# phase step k eps reps buckets measurements rounds found\n";
  for (const auto& r : table) {
    out << r.phase << ' ' << r.step << ' ' << format_double(r.k) << ' ' << format_double(r.eps) << ' ' << r.reps
        << ' ' << r.buckets << ' ' << r.measurements << ' ' << r.rounds << ' ' << r.found << '\n';
  }
  return out.str();
}

}  // namespace sketchrec

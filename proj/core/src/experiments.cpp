#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "sketchrec/adaptive.hpp"
#include "sketchrec/count_min.hpp"
#include "sketchrec/count_sketch.hpp"
#include "sketchrec/gaussian_facts.hpp"
#include "sketchrec/guv.hpp"
#include "sketchrec/harness.hpp"
#include "sketchrec/pipeline.hpp"
#include "sketchrec/stream.hpp"
#include "sketchrec/weak_system.hpp"

namespace sketchrec {
namespace detail {
namespace {

constexpr std::uint64_t kInputLabel = 1;
constexpr std::uint64_t kSketchLabel = 2;

void tune(const ExperimentConfig& cfg, const std::string& key, double& v) { v = cfg.get_double(key, v); }
void tune(const ExperimentConfig& cfg, const std::string& key, std::size_t& v) { v = cfg.get_size(key, v); }

std::string kv(const std::string& key, double v) { return key + "=" + format_double(v); }

bool contains_all(const std::vector<std::size_t>& list, const std::vector<std::size_t>& needed, std::size_t& missed) {
  const std::set<std::size_t> have(list.begin(), list.end());
  missed = 0;
  for (auto i : needed) missed += have.count(i) == 0;
  return missed == 0;
}

// ---------------------------------------------------------------- inputs

TurnstileStream stream_from_counts(const std::vector<std::int64_t>& counts, Rng& rng) {
  TurnstileStream s;
  s.n = counts.size();
  s.mode = StreamMode::strict;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != 0) s.updates.push_back({i, static_cast<double>(counts[i])});
  }
  std::shuffle(s.updates.begin(), s.updates.end(), rng);
  return s;
}

// h items exactly at the eps threshold, the rest of the mass on items just
// below it. `order` lists the positions to use, most preferred first.
std::vector<std::int64_t> adversarial_counts(std::size_t n, double eps, const std::vector<std::size_t>& order,
                                             std::size_t heavy) {
  constexpr std::int64_t unit = 1000;
  const auto total = static_cast<std::int64_t>(std::llround(static_cast<double>(unit) / eps));
  const std::int64_t near = unit * 19 / 20;
  std::vector<std::int64_t> c(n, 0);
  std::int64_t left = total;
  std::size_t pos = 0;
  for (std::size_t j = 0; j < heavy && pos < order.size() && left >= unit; ++j, ++pos) {
    c[order[pos]] = unit;
    left -= unit;
  }
  while (left > 0 && pos < order.size()) {
    const std::int64_t v = std::min(near, left);
    c[order[pos++]] = v;
    left -= v;
  }
  if (left > 0) c[order.back()] += left;
  return c;
}

std::vector<std::size_t> random_order(std::size_t n, Rng& rng) {
  std::vector<std::size_t> o(n);
  std::iota(o.begin(), o.end(), 0);
  std::shuffle(o.begin(), o.end(), rng);
  return o;
}

std::vector<std::int64_t> planted_counts(std::size_t n, double eps, std::size_t length, Rng& rng) {
  const std::size_t heavy = std::max<std::size_t>(1, static_cast<std::size_t>(0.5 / eps));
  const auto order = random_order(n, rng);
  std::vector<std::int64_t> c(n, 0);
  const auto each = static_cast<std::int64_t>(std::ceil(1.5 * eps * static_cast<double>(length)));
  std::size_t j = 0;
  std::int64_t used = 0;
  for (; j < heavy && j < n; ++j) {
    c[order[j]] = each;
    used += each;
  }
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::int64_t r = used; r < static_cast<std::int64_t>(length); ++r) c[pick(rng)] += 1;
  return c;
}

TurnstileStream strict_input(const ExperimentConfig& cfg, const std::string& dist, std::size_t n, double eps,
                             std::uint64_t seed) {
  const std::size_t length = cfg.get_size("length", 20000);
  if (dist == "zipf") {
    return gen_zipf(n, cfg.get_double("zipf", 1.1), length, StreamMode::strict, seed, cfg.get_double("deletions", 0.2));
  }
  Rng rng(seed);
  if (dist == "planted") return stream_from_counts(planted_counts(n, eps, length, rng), rng);
  if (dist == "adversarial") {
    const std::size_t heavy = std::max<std::size_t>(1, static_cast<std::size_t>(0.5 / eps));
    return stream_from_counts(adversarial_counts(n, eps, random_order(n, rng), heavy), rng);
  }
  throw ConfigError("unsupported input distribution '" + dist + "' for a strict-stream experiment");
}

PlantedSignal signal_input(const ExperimentConfig& cfg, const std::string& dist, std::size_t n, std::size_t k,
                           double eps, std::uint64_t seed) {
  const double tail = cfg.get_double("tail_energy", 1.0);
  const double sigma = std::sqrt(tail / static_cast<double>(n));
  if (dist == "powerlaw") {
    return gen_power_law(n, k, cfg.get_double("alpha", 0.5), cfg.get_double("head_scale", 1.0), sigma, seed);
  }
  if (dist == "planted") return gen_planted(n, cfg.get_size("heads", k), cfg.get_double("head_value", 1.0), sigma, seed);
  if (dist == "spiked") return gen_spiked(n, k, eps, seed, cfg.get_bool("noise", true));
  if (dist == "sparse") return gen_sparse(n, k, seed);
  throw ConfigError("unsupported input distribution '" + dist + "' for a signal experiment");
}

std::string dist_or(const ExperimentConfig& cfg, const char* fallback) {
  return cfg.dist.empty() ? std::string(fallback) : cfg.dist;
}

CmConstants cm_constants(const ExperimentConfig& cfg) {
  CmConstants c;
  tune(cfg, "c_r", c.c_r);
  tune(cfg, "c_b", c.c_b);
  tune(cfg, "c_0", c.c_0);
  tune(cfg, "c_delta", c.c_delta);
  return c;
}

WeakSystemConstants weak_constants(const ExperimentConfig& cfg, WeakSystemConstants c) {
  tune(cfg, "id.c_r", c.id.c_r);
  tune(cfg, "id.c_b", c.id.c_b);
  tune(cfg, "id.big_cutoff", c.id.big_cutoff);
  tune(cfg, "id.sign_reps", c.id.sign_reps);
  tune(cfg, "est.c_r", c.est.c_r);
  tune(cfg, "est.c_b", c.est.c_b);
  tune(cfg, "est.c_t", c.est.c_t);
  tune(cfg, "eta", c.eta);
  return c;
}

// Recovered if (x_i - xhat_i)^2 <= (eps/k) ||x_{-k}||^2.
std::size_t unrecovered_heads(std::span<const double> x, const std::vector<std::size_t>& heads,
                              const std::vector<double>& xhat_dense, double threshold) {
  std::size_t miss = 0;
  for (auto i : heads) {
    const double d = x[i] - xhat_dense[i];
    miss += d * d > threshold;
  }
  return miss;
}

// ---------------------------------------------------------------- heavy hitters

PreparedExperiment prepare_hh_cm(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.get_size("n", 65536);
  const double eps = cfg.get_double("eps", 0.05);
  const double delta = cfg.get_double("delta", 0.01);
  const bool uniform = cfg.get_bool("uniform", false);
  const CmConstants c = cm_constants(cfg);
  const std::string dist = dist_or(cfg, "zipf");
  auto make = [=](std::uint64_t seed) {
    return uniform ? CountMinG3::uniform(n, eps, seed, c) : CountMinG3(n, eps, delta, seed, c);
  };
  const CountMinG3 probe = make(0);
  PreparedExperiment p;
  p.default_min_success = 1 - delta - 3 * binomial_sigma(delta, std::max<std::size_t>(1, cfg.trials));
  p.notes = {kv("rows", probe.rows()), kv("buckets", probe.buckets()), kv("independence", probe.independence()),
             kv("list_size", probe.list_size()), "dist=" + dist};
  p.trial = [=](std::uint64_t seed) {
    const TurnstileStream s = strict_input(cfg, dist, n, eps, derive_seed(seed, kInputLabel));
    const ExactVector x = materialize(s);
    CountMinG3 sk = make(derive_seed(seed, kSketchLabel));
    sk.ingest(s);
    const auto heavy = exact_heavy_hitters(x.view(), eps, 1);
    const auto list = sk.query();
    TrialReport r;
    std::size_t missed = 0;
    r.success = contains_all(list, heavy, missed);
    r.metric = static_cast<double>(missed);
    r.measurements = sk.rows() * sk.buckets();
    r.extras = {{"heavy", static_cast<double>(heavy.size())}, {"list", static_cast<double>(list.size())}};
    return r;
  };
  return p;
}

PreparedExperiment prepare_hh_dyadic(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.get_size("n", 65536);
  const double eps = cfg.get_double("eps", 0.05);
  const double delta = cfg.get_double("delta", 0.01);
  const CmConstants c = cm_constants(cfg);
  const std::string dist = dist_or(cfg, "zipf");
  const DyadicG3 probe(n, eps, delta, 0, c);
  const std::size_t levels = probe.depth() - probe.first_sketched_level() + 1;
  PreparedExperiment p;
  p.default_min_success = 1 - delta - 3 * binomial_sigma(delta, std::max<std::size_t>(1, cfg.trials));
  p.notes = {kv("rows", probe.rows()), kv("buckets", probe.buckets()), kv("sketched_levels", levels),
             kv("level_delta", probe.level_delta()), kv("list_size", probe.list_size()), "dist=" + dist};
  p.trial = [=](std::uint64_t seed) {
    const TurnstileStream s = strict_input(cfg, dist, n, eps, derive_seed(seed, kInputLabel));
    const ExactVector x = materialize(s);
    DyadicG3 sk(n, eps, delta, derive_seed(seed, kSketchLabel), c);
    sk.ingest(s);
    const auto heavy = exact_heavy_hitters(x.view(), eps, 1);
    const auto list = sk.query();
    TrialReport r;
    std::size_t missed = 0;
    r.success = contains_all(list, heavy, missed);
    r.metric = static_cast<double>(missed);
    r.measurements = sk.rows() * sk.buckets() * levels;
    r.extras = {{"heavy", static_cast<double>(heavy.size())}, {"list", static_cast<double>(list.size())}};
    return r;
  };
  return p;
}

PreparedExperiment prepare_hh_l2(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.get_size("n", 4096);
  const double eps = cfg.get_double("eps", 0.1);
  GaussianMedianConstants c;
  tune(cfg, "c_d", c.c_d);
  tune(cfg, "c_b", c.c_b);
  tune(cfg, "c_t", c.c_t);
  const std::string dist = dist_or(cfg, "planted");
  const std::size_t k = static_cast<std::size_t>(std::ceil(1 / eps - 1e-9));
  const std::size_t heads = cfg.get_size("heads", std::max<std::size_t>(1, k / 2));
  const GaussianMedianSketch probe(n, eps, 0, c);
  PreparedExperiment p;
  p.notes = {kv("rows", probe.rows()), kv("buckets", probe.buckets()), kv("list_size", probe.list_size()),
             "dist=" + dist};
  p.trial = [=](std::uint64_t seed) {
    ExperimentConfig local = cfg;
    if (!local.has("heads")) local.params["heads"] = std::to_string(heads);
    const PlantedSignal s = signal_input(local, dist, n, heads, eps, derive_seed(seed, kInputLabel));
    GaussianMedianSketch sk(n, eps, derive_seed(seed, kSketchLabel), c);
    sk.add(s.x.view());
    const auto target = head_eps(s.x.view(), k, 1.0);
    const auto list = sk.query();
    TrialReport r;
    std::size_t missed = 0;
    r.success = contains_all(list, target, missed);
    r.metric = static_cast<double>(missed);
    r.measurements = sk.measurement_count();
    r.extras = {{"heavy", static_cast<double>(target.size())}, {"list", static_cast<double>(list.size())}};
    return r;
  };
  return p;
}

// Non-heavy positions sharing the most right vertices with a decoy, so the
// decoy's counters absorb as much foreign mass as the graph allows.
std::vector<std::size_t> decoy_order(const NeighborTable& g, std::size_t decoy, Rng& rng) {
  std::vector<std::uint32_t> mine(g.adj.begin() + static_cast<std::ptrdiff_t>(decoy * g.degree),
                                  g.adj.begin() + static_cast<std::ptrdiff_t>((decoy + 1) * g.degree));
  std::sort(mine.begin(), mine.end());
  std::vector<std::pair<double, std::size_t>> scored;
  std::uniform_real_distribution<double> jitter(0, 0.5);
  for (std::size_t i = 0; i < g.left; ++i) {
    if (i == decoy) continue;
    std::size_t shared = 0;
    for (std::size_t d = 0; d < g.degree; ++d) shared += std::binary_search(mine.begin(), mine.end(), g(i, d));
    scored.emplace_back(static_cast<double>(shared) + jitter(rng), i);
  }
  std::sort(scored.begin(), scored.end(), std::greater<>());
  std::vector<std::size_t> order;
  for (auto& [s, i] : scored) order.push_back(i);
  return order;
}

PreparedExperiment prepare_hh_det(const ExperimentConfig& cfg) {
  const auto q = static_cast<std::uint32_t>(cfg.get_size("q", 13));
  const auto a = static_cast<std::uint32_t>(cfg.get_size("a", 2));
  const auto cc = static_cast<std::uint32_t>(cfg.get_size("c", 2));
  const auto h = static_cast<std::uint32_t>(cfg.get_size("h", 2));
  const double eps = cfg.get_double("eps", 0.75);
  const double c_list = cfg.get_double("c_list", 2.2);
  const std::string dist = dist_or(cfg, "adversarial");
  const GuvExpander g(make_guv_params(q, a, cc, h));
  const std::size_t n = cfg.get_size("n", g.left_size());
  auto table = std::make_shared<NeighborTable>(g.table(n));
  const DetCertificate cert = certify_det(*table, eps, c_list);
  std::ostringstream e;
  for (std::size_t j = 0; j < g.params().irreducible.size(); ++j) e << (j ? "," : "") << g.params().irreducible[j];
  PreparedExperiment p;
  p.default_min_success = 1.0;
  p.notes = {"guv q=" + std::to_string(q) + " a=" + std::to_string(a) + " c=" + std::to_string(cc) +
                 " h=" + std::to_string(h) + " E=[" + e.str() + "]",
             kv("left", table->left), kv("degree", table->degree), kv("right", table->right),
             kv("set_size", cert.expansion.set_size), kv("sets_checked", cert.expansion.sets_checked),
             kv("min_neighborhood", cert.expansion.min_neighborhood), kv("zeta", cert.expansion.zeta),
             kv("c_list", c_list), std::string("certified=") + (cert.certified ? "1" : "0"), "dist=" + dist};
  p.trial = [=](std::uint64_t seed) {
    TurnstileStream s;
    if (dist == "adversarial") {
      Rng rng(derive_seed(seed, kInputLabel));
      const std::size_t heavy = std::max<std::size_t>(1, static_cast<std::size_t>(1 / eps));
      std::vector<std::size_t> order = random_order(n, rng);
      if (rng() & 1) {
        // Heavy items first, then a decoy's closest neighbours fill the rest.
        const std::size_t decoy = order[heavy];
        std::vector<std::size_t> rest = decoy_order(*table, decoy, rng);
        std::vector<std::size_t> head(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(heavy));
        std::erase_if(rest, [&](std::size_t i) { return std::find(head.begin(), head.end(), i) != head.end(); });
        head.insert(head.end(), rest.begin(), rest.end());
        order = std::move(head);
      }
      s = stream_from_counts(adversarial_counts(n, eps, order, heavy), rng);
    } else {
      s = strict_input(cfg, dist, n, eps, derive_seed(seed, kInputLabel));
    }
    const ExactVector x = materialize(s);
    DetHHSketch sk(*table, eps, c_list);
    sk.ingest(s);
    const auto heavy = exact_heavy_hitters(x.view(), eps, 1);
    const auto list = sk.query();
    TrialReport r;
    std::size_t missed = 0;
    r.success = contains_all(list, heavy, missed);
    r.metric = static_cast<double>(missed);
    r.measurements = sk.counter_count();
    r.extras = {{"heavy", static_cast<double>(heavy.size())}, {"list", static_cast<double>(list.size())},
                {"certified", cert.certified ? 1.0 : 0.0}};
    return r;
  };
  return p;
}

// ---------------------------------------------------------------- estimation and weak systems

PreparedExperiment prepare_cs_est(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.get_size("n", 4096);
  const std::size_t k = cfg.get_size("k", 8);
  const double eps = cfg.get_double("eps", 0.25);
  const double delta = cfg.get_double("delta", 0.05);
  const double zeta = cfg.get_double("zeta", 0.5);
  CountSketchConstants c;
  tune(cfg, "c_r", c.c_r);
  tune(cfg, "c_b", c.c_b);
  tune(cfg, "c_t", c.c_t);
  const std::string dist = dist_or(cfg, "planted");
  const auto sizing = cs_sizing(k, eps, delta, c);
  PreparedExperiment p;
  const double budget = 0.05;
  p.default_min_success = 1 - budget - 3 * binomial_sigma(budget, std::max<std::size_t>(1, cfg.trials));
  p.notes = {kv("rows", sizing.rows), kv("buckets", sizing.buckets), kv("capacity", sizing.capacity),
             kv("zeta_k", zeta * static_cast<double>(k)), "dist=" + dist};
  p.trial = [=](std::uint64_t seed) {
    const PlantedSignal s = signal_input(cfg, dist, n, k, eps, derive_seed(seed, kInputLabel));
    CountSketchEst sk(n, k, eps, delta, derive_seed(seed, kSketchLabel), c);
    const auto y = sk.measure(s.x.view());
    // Candidates: the planted support topped up with random coordinates.
    Rng rng(derive_seed(seed, 3));
    std::set<std::size_t> t(s.support.begin(), s.support.end());
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    while (t.size() < std::min(sk.capacity(), n)) t.insert(pick(rng));
    const std::vector<std::size_t> cand(t.begin(), t.end());
    const auto est = sk.estimate_from(y, cand);
    const std::size_t bad = count_bad_estimates(s.x.view(), cand, est, k, eps);
    TrialReport r;
    r.metric = static_cast<double>(bad);
    r.bound = zeta * static_cast<double>(k);
    r.success = r.metric <= r.bound;
    r.measurements = sk.measurement_count();
    return r;
  };
  return p;
}

PreparedExperiment prepare_weak(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.get_size("n", 4096);
  const std::size_t k = cfg.get_size("k", 8);
  const double eps = cfg.get_double("eps", 0.25);
  const double delta = cfg.get_double("delta", 0.05);
  const double zeta = cfg.get_double("zeta", 0.5);
  const WeakSystemConstants c = weak_constants(cfg, WeakSystemConstants{});
  const std::string dist = dist_or(cfg, "powerlaw");
  const WeakSystem probe(n, k, zeta, eps, delta, 0, c);
  PreparedExperiment p;
  p.default_min_success = dist == "sparse" ? 0.95 : 0.9;
  p.notes = {kv("rows", probe.measurement_count()), kv("id_reps", probe.identifier().reps()),
             kv("id_buckets", probe.identifier().buckets()), kv("est_rows", probe.estimator().rows()),
             kv("est_buckets", probe.estimator().buckets()), "dist=" + dist};
  p.trial = [=](std::uint64_t seed) {
    const PlantedSignal s = signal_input(cfg, dist, n, k, eps, derive_seed(seed, kInputLabel));
    const WeakSystem w(n, k, zeta, eps, delta, derive_seed(seed, kSketchLabel), c);
    const auto out = w.recover(w.measure(s.x.view()));
    TrialReport r;
    r.measurements = w.measurement_count();
    if (dist == "sparse") {
      r.metric = std::sqrt(recovery_error(s.x.view(), out.entries));
      r.bound = 1e-9 * std::sqrt(s.x.norm2_sq());
    } else {
      r.metric = static_cast<double>(weak_head_miss_count(s.x.view(), out.entries, k, c.eta));
      r.bound = zeta * static_cast<double>(k);
    }
    r.success = r.metric <= r.bound;
    r.extras = {{"identified", static_cast<double>(out.identified.size())}};
    return r;
  };
  return p;
}

// ---------------------------------------------------------------- non-adaptive recovery

PreparedExperiment prepare_sr_pipeline(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.get_size("n", 16384);
  const std::size_t k = cfg.get_size("k", 16);
  const double eps = cfg.get_double("eps", 0.1);
  const Schedule schedule = parse_schedule(cfg.get("schedule", "quadratic"));
  PipelineConstants c;
  tune(cfg, "phase_c", c.phase_c);
  tune(cfg, "fail_c", c.fail_c);
  tune(cfg, "fast_c", c.fast_c);
  c.weak = weak_constants(cfg, c.weak);
  c.fast_weak = weak_constants(cfg, c.fast_weak);
  const bool check = cfg.get_bool("bookkeeping", true);
  const std::string dist = dist_or(cfg, "powerlaw");
  const SparseRecoveryPipeline probe(n, k, eps, schedule, 0, c);
  const double reference = pipeline_row_reference(n, k, eps);
  PreparedExperiment p;
  p.notes = {std::string("schedule=") + to_string(schedule), kv("levels", probe.level_count()),
             kv("rows", probe.measurement_count()), kv("row_reference", reference),
             kv("row_ratio", static_cast<double>(probe.measurement_count()) / reference), "dist=" + dist};
  for (std::size_t i = 0; i < probe.level_count(); ++i) {
    const auto& l = probe.level(i);
    p.notes.push_back("level " + std::to_string(i) + " k=" + std::to_string(l.k) + " eps=" + format_double(l.eps) +
                      " delta=" + format_double(l.delta) + " rows=" + std::to_string(probe.system(i).measurement_count()));
  }
  p.trial = [=](std::uint64_t seed) {
    const PlantedSignal s = signal_input(cfg, dist, n, k, eps, derive_seed(seed, kInputLabel));
    const auto x = s.x.view();
    const SparseRecoveryPipeline pipe(n, k, eps, schedule, derive_seed(seed, kSketchLabel), c);
    const PipelineResult res = pipe.recover(pipe.measure(x), check);
    const double tail = tail_energy(x, k);
    TrialReport r;
    r.metric = recovery_error(x, res.xhat);
    r.bound = (1 + eps) * tail + 1e-18 * s.x.norm2_sq();
    r.success = r.metric <= r.bound;
    r.measurements = pipe.measurement_count();

    double worst = 0;
    bool monotone = true;
    if (check) {
      const auto heads = head_eps(x, k, eps);
      const double thr = eps / static_cast<double>(k) * tail;
      std::vector<double> partial(n, 0.0);
      std::size_t prev = heads.size();
      for (std::size_t i = 0; i < res.levels.size(); ++i) {
        std::vector<double> rest(x.begin(), x.end());
        for (std::size_t j = 0; j < n; ++j) rest[j] -= partial[j];
        const auto direct = pipe.system(i).measure(rest);
        const auto fresh = pipe.system(i).measure(x);
        double diff = 0, scale = 0;
        for (std::size_t j = 0; j < direct.size(); ++j) {
          diff = std::max(diff, std::abs(direct[j] - res.levels[i].residual[j]));
          scale = std::max(scale, std::abs(fresh[j]));
        }
        worst = std::max(worst, scale > 0 ? diff / scale : diff);
        for (auto [idx, v] : res.levels[i].found) partial[idx] += v;
        const std::size_t now = unrecovered_heads(x, heads, partial, thr);
        monotone = monotone && now <= prev;
        prev = now;
      }
    }
    r.extras = {{"row_ratio", static_cast<double>(pipe.measurement_count()) / reference},
                {"bookkeeping", worst},
                {"monotone", monotone ? 1.0 : 0.0},
                {"support", static_cast<double>(res.xhat.size())}};
    return r;
  };
  return p;
}

PreparedExperiment prepare_spiked(const ExperimentConfig& cfg) {
  const std::size_t n = cfg.get_size("n", 65536);
  const std::size_t k = cfg.get_size("k", 32);
  const double eps = cfg.get_double("eps", 0.2);
  const double delta = cfg.get_double("delta", 0.05);
  SpikedConstants c;
  tune(cfg, "c_r", c.c_r);
  tune(cfg, "c_b", c.c_b);
  tune(cfg, "c_t", c.c_t);
  tune(cfg, "alpha", c.alpha);
  tune(cfg, "eta", c.eta);
  const std::string dist = dist_or(cfg, "spiked");
  const SpikedRecovery probe(n, k, eps, delta, 0, c);
  const double reference = spiked_row_reference(n, k, eps, delta);
  PreparedExperiment p;
  p.default_min_success = 1 - delta - 0.03;
  p.notes = {kv("rows", probe.rows()), kv("buckets", probe.buckets()), kv("measurements", probe.measurement_count()),
             kv("row_reference", reference),
             kv("row_ratio", static_cast<double>(probe.measurement_count()) / reference), kv("gamma", probe.gamma()),
             "dist=" + dist};
  p.trial = [=](std::uint64_t seed) {
    const PlantedSignal s = signal_input(cfg, dist, n, k, eps, derive_seed(seed, kInputLabel));
    const auto x = s.x.view();
    const SpikedRecovery alg(n, k, eps, delta, derive_seed(seed, kSketchLabel), c);
    const auto xhat = alg.recover(alg.measure(x));
    TrialReport r;
    r.metric = recovery_error(x, xhat);
    r.bound = (1 + eps) * tail_energy(x, k) + 1e-18 * s.x.norm2_sq();
    r.success = r.metric <= r.bound;
    r.measurements = alg.measurement_count();
    r.extras = {{"row_ratio", static_cast<double>(alg.measurement_count()) / reference},
                {"support", static_cast<double>(xhat.size())}};
    return r;
  };
  return p;
}

// ---------------------------------------------------------------- adaptive recovery

AdaptiveConstants adaptive_constants(const ExperimentConfig& cfg) {
  AdaptiveConstants c;
  tune(cfg, "c_prime", c.c_prime);
  tune(cfg, "c", c.c);
  tune(cfg, "gamma", c.gamma);
  tune(cfg, "window", c.one.window);
  tune(cfg, "majority", c.one.majority);
  return c;
}

TrialReport adaptive_trial(const ExperimentConfig& cfg, const std::string& mode, const std::string& dist,
                           std::size_t n, std::size_t k, double eps, std::uint64_t seed, std::string* table) {
  TrialReport r;
  const AdaptiveConstants c = adaptive_constants(cfg);
  const double loglog = std::log2(std::log2(static_cast<double>(n)));
  if (mode == "one-sparse") {
    Rng rng(derive_seed(seed, kInputLabel));
    std::normal_distribution<double> normal;
    std::vector<double> x(n);
    double norm = 0;
    for (auto& v : x) {
      v = normal(rng);
      norm += v * v;
    }
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    norm -= x[j] * x[j];
    const double ratio = cfg.get_double("ratio", 10.0);
    const double noise = cfg.get_double("noise", 1.0);
    for (auto& v : x) v *= noise / std::sqrt(norm);
    x[j] = ratio * ((rng() & 1) ? 1.0 : -1.0);
    std::vector<std::uint32_t> u(n);
    std::iota(u.begin(), u.end(), 0u);
    MeasurementOracle oracle(x);
    const auto got = one_sparse_recover(oracle, std::move(u), derive_seed(seed, kSketchLabel), c.one);
    r.success = got.has_value() && *got == j;
    r.metric = r.success ? 0 : 1;
    r.measurements = oracle.measurements();
    r.rounds = oracle.rounds();
    r.extras = {{"round_ratio", static_cast<double>(oracle.rounds()) / loglog},
                {"violations", static_cast<double>(oracle.violations())}};
    return r;
  }
  const PlantedSignal s = signal_input(cfg, dist, n, k, eps, derive_seed(seed, kInputLabel));
  const auto x = s.x.view();
  MeasurementOracle oracle(x);
  AdaptiveResult res;
  if (mode == "full") {
    res = adaptive_k_recover(oracle, k, eps, derive_seed(seed, kSketchLabel), c);
  } else if (mode == "lowk") {
    LowSparsityConstants lc;
    lc.one = c.one;
    tune(cfg, "class_power", lc.class_power);
    res = adaptive_low_sparsity(oracle, k, eps, derive_seed(seed, kSketchLabel), lc);
  } else {
    throw ConfigError("unknown adaptive mode '" + mode + "'");
  }
  const double tail = tail_energy(x, k);
  r.metric = recovery_error(x, res.xhat);
  r.bound = (1 + eps) * tail + 1e-18 * s.x.norm2_sq();
  bool ok = r.metric <= r.bound;
  std::size_t missed = 0;
  if (mode == "lowk") {
    std::vector<std::size_t> found;
    for (auto [i, v] : res.xhat) found.push_back(i);
    ok = contains_all(found, head_eps(x, k, eps), missed) && ok;
  }
  // Observed values must be the exact coordinates.
  std::size_t inexact = 0;
  for (auto [i, v] : res.xhat) inexact += v != x[i];
  r.success = ok && res.violations == 0;
  r.measurements = res.measurements;
  r.rounds = res.rounds;
  r.extras = {{"violations", static_cast<double>(res.violations)},
              {"heads_missed", static_cast<double>(missed)},
              {"inexact_observations", static_cast<double>(inexact)},
              {"support", static_cast<double>(res.xhat.size())}};
  if (table) *table = format_phase_table(res.table);
  return r;
}

PreparedExperiment prepare_sr_adaptive(const ExperimentConfig& cfg) {
  const std::string mode = cfg.get("mode", "full");
  const bool one = mode == "one-sparse";
  const std::size_t n = cfg.get_size("n", one ? 65536 : 16384);
  const std::size_t k = cfg.get_size("k", mode == "lowk" ? 4 : 64);
  const double eps = cfg.get_double("eps", 0.25);
  const std::string dist = dist_or(cfg, "powerlaw");
  PreparedExperiment p;
  p.default_min_success = one ? 0.99 : 0.95;
  p.notes = {"mode=" + mode, kv("loglog_n", std::log2(std::log2(static_cast<double>(n))))};
  if (!one) {
    p.notes.push_back("dist=" + dist);
    std::string table;
    adaptive_trial(cfg, mode, dist, n, k, eps, trial_seed(cfg.seed, 0), &table);
    std::istringstream lines(table);
    std::string line;
    p.notes.push_back("phase table of trial 0:");
    while (std::getline(lines, line)) p.notes.push_back(line);
  }
  p.trial = [=](std::uint64_t seed) { return adaptive_trial(cfg, mode, dist, n, k, eps, seed, nullptr); };
  return p;
}

// ---------------------------------------------------------------- Gaussian facts

PreparedExperiment prepare_facts(const ExperimentConfig& cfg) {
  const double delta = cfg.get_double("delta", 0.05);
  const std::size_t samples = cfg.get_size("samples", 1000000);
  const std::size_t events = cfg.get_size("event_trials", 100000);
  const double tol = cfg.get_double("tv_tol", 0.01);
  PreparedExperiment p;
  p.default_min_success = 1.0;
  const std::size_t n1 = static_cast<std::size_t>(std::ceil(32 * std::log(6 / delta)));
  const Interval centred = l1_centered_interval(n1);
  p.notes = {kv("delta", delta), kv("samples", samples), kv("event_trials", events),
             "l1 fact window [n/8, 3n/4] at n=" + std::to_string(n1) + "; mean-centred window [" +
                 format_double(centred.lo) + ", " + format_double(centred.hi) + "]"};
  p.trial = [=](std::uint64_t seed) {
    const double taus[] = {0.0, 1.0, 2.0};
    const auto tv = gaussian_fact_check(taus, samples, derive_seed(seed, 1));
    const FactEvent l1 = fact_l1_concentration(delta, events, derive_seed(seed, 2));
    const FactEvent l2 = fact_l2_concentration(delta, events, derive_seed(seed, 3));
    const FactEvent tail = fact_univariate_tail(delta, events, derive_seed(seed, 4));
    TrialReport r;
    double gap = 0;
    for (const auto& row : tv) gap = std::max(gap, row.gap);
    r.metric = gap;
    r.bound = tol;
    r.success = gap <= tol && l1.passed() && l2.passed() && tail.passed();
    r.measurements = samples;
    r.extras = {{"tv_gap_0", tv[0].gap},        {"tv_gap_1", tv[1].gap},        {"tv_gap_2", tv[2].gap},
                {"tv_mc_2", tv[2].monte_carlo}, {"l1_freq", l1.frequency()},    {"l2_freq", l2.frequency()},
                {"tail_freq", tail.frequency()}, {"event_bound", l1.bound}};
    return r;
  };
  return p;
}

}  // namespace

void add_builtin_experiments(std::vector<Experiment>& r) {
  r.push_back({"hh-cm", "Count-Min with O(1/eps)-wise hashing: list contains every l1 eps-heavy hitter", prepare_hh_cm});
  r.push_back({"hh-dyadic", "dyadic tree of promise Count-Min sketches", prepare_hh_dyadic});
  r.push_back({"hh-l2", "Gaussian-median sketch: list contains H_{1/eps,1}", prepare_hh_l2});
  r.push_back({"hh-det", "expander-based deterministic heavy hitters on a certified graph", prepare_hh_det});
  r.push_back({"cs-est", "Count-Sketch estimation: bad estimates within the candidate set at most zeta k", prepare_cs_est});
  r.push_back({"weak", "single weak system: exact on k-sparse inputs, head miss at most zeta k otherwise", prepare_weak});
  r.push_back({"sr-pipeline", "stacked weak systems, l2/l2 recovery", prepare_sr_pipeline});
  r.push_back({"sr-adaptive", "adaptive recovery: full, lowk or one-sparse", prepare_sr_adaptive});
  r.push_back({"spiked", "spiked covariance recovery with a magnitude window", prepare_spiked});
  r.push_back({"facts", "Gaussian total variation and concentration facts", prepare_facts});
}

}  // namespace detail
}  // namespace sketchrec

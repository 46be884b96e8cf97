#include "sketchrec/gaussian_facts.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "sketchrec/random.hpp"

namespace sketchrec {

double gaussian_tv_analytic(double tau_norm) { return 2 * normal_cdf(std::abs(tau_norm) / 2) - 1; }

double gaussian_tv_monte_carlo(double tau_norm, std::size_t samples, std::uint64_t seed, std::size_t dim,
                               double bin_width) {
  if (dim == 0 || samples == 0 || !(bin_width > 0)) throw std::invalid_argument("gaussian_tv_monte_carlo: bad arguments");
  const double t = std::abs(tau_norm);
  const double lo = -8.0, hi = t + 8.0;
  const std::size_t bins = static_cast<std::size_t>(std::ceil((hi - lo) / bin_width));
  std::vector<double> p(bins, 0.0), q(bins, 0.0);
  // tau points along the diagonal; the unit direction has equal coordinates.
  const double dir = 1.0 / std::sqrt(static_cast<double>(dim));
  const double shift = t * dir;
  Rng rng(seed);
  std::normal_distribution<double> normal;
  auto bin_of = [&](double v) -> long {
    const double b = std::floor((v - lo) / bin_width);
    return b < 0 || b >= static_cast<double>(bins) ? -1 : static_cast<long>(b);
  };
  for (std::size_t s = 0; s < samples; ++s) {
    double a = 0, b = 0;
    for (std::size_t d = 0; d < dim; ++d) {
      a += normal(rng) * dir;
      b += (normal(rng) + shift) * dir;
    }
    if (long j = bin_of(a); j >= 0) p[static_cast<std::size_t>(j)] += 1;
    if (long j = bin_of(b); j >= 0) q[static_cast<std::size_t>(j)] += 1;
  }
  double l1 = 0;
  for (std::size_t j = 0; j < bins; ++j) l1 += std::abs(p[j] - q[j]);
  return l1 / (2.0 * static_cast<double>(samples));
}

std::vector<TvRow> gaussian_fact_check(std::span<const double> taus, std::size_t samples, std::uint64_t seed) {
  if (samples < 100000) throw std::invalid_argument("gaussian_fact_check: need at least 1e5 samples");
  std::vector<TvRow> rows;
  for (std::size_t j = 0; j < taus.size(); ++j) {
    TvRow r{taus[j], gaussian_tv_analytic(taus[j]), gaussian_tv_monte_carlo(taus[j], samples, derive_seed(seed, j)), 0};
    r.gap = std::abs(r.analytic - r.monte_carlo);
    rows.push_back(r);
  }
  return rows;
}

namespace {

template <class Statistic>
FactEvent run_event(std::string name, std::size_t dim, double lo, double hi, double delta, std::size_t trials,
                    std::uint64_t seed, Statistic stat) {
  FactEvent e{std::move(name), dim, lo, hi, trials, 0, 1 - delta / 3};
  Rng rng(seed);
  std::normal_distribution<double> normal;
  for (std::size_t t = 0; t < trials; ++t) {
    const double v = stat(rng, normal);
    e.hits += v >= lo && v <= hi;
  }
  return e;
}

std::size_t dim_for(double c, double delta) {
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("gaussian facts: delta must be in (0, 1)");
  return static_cast<std::size_t>(std::ceil(c * std::log(6 / delta)));
}

}  // namespace

FactEvent fact_l1_concentration(double delta, std::size_t trials, std::uint64_t seed) {
  const std::size_t n = dim_for(32, delta);
  const double nd = static_cast<double>(n);
  return run_event("l1_concentration", n, nd / 8, 3 * nd / 4, delta, trials, seed, [n](Rng& rng, auto& normal) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(normal(rng));
    return s;
  });
}

FactEvent fact_l2_concentration(double delta, std::size_t trials, std::uint64_t seed) {
  const std::size_t n = dim_for(18, delta);
  const double r = std::sqrt(static_cast<double>(n));
  return run_event("l2_concentration", n, r / 2, 3 * r / 2, delta, trials, seed, [n](Rng& rng, auto& normal) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = normal(rng);
      s += g * g;
    }
    return std::sqrt(s);
  });
}

FactEvent fact_univariate_tail(double delta, std::size_t trials, std::uint64_t seed) {
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("gaussian facts: delta must be in (0, 1)");
  const double cut = 4 * std::sqrt(std::log(1 / delta));
  return run_event("univariate_tail", 1, 0, cut, delta, trials, seed,
                   [](Rng& rng, auto& normal) { return std::abs(normal(rng)); });
}

Interval l1_centered_interval(std::size_t n) {
  const double nd = static_cast<double>(n);
  const double mean = std::sqrt(2 / std::numbers::pi) * nd;
  return {mean - nd / 4, mean + nd / 4};
}

}  // namespace sketchrec

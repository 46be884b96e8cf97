#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sketchrec/stats.hpp"

namespace sketchrec {

// D_TV(N(0, I_r), N(tau, I_r)) = P(|g| <= ||tau|| / 2).
double gaussian_tv_analytic(double tau_norm);

// Samples both distributions in dimension r, projects onto tau / ||tau||,
// and takes half the L1 distance between the two histograms.
double gaussian_tv_monte_carlo(double tau_norm, std::size_t samples, std::uint64_t seed, std::size_t dim = 3,
                               double bin_width = 0.1);

struct TvRow {
  double tau;
  double analytic;
  double monte_carlo;
  double gap;
};

// Requires samples >= 1e5.
std::vector<TvRow> gaussian_fact_check(std::span<const double> taus, std::size_t samples, std::uint64_t seed);

struct FactEvent {
  std::string name;
  std::size_t dim = 0;   // n for the norm facts, 1 for the univariate tail
  double lo = 0;
  double hi = 0;
  std::size_t trials = 0;
  std::size_t hits = 0;  // trials whose statistic landed in [lo, hi]
  double bound = 0;      // required frequency 1 - delta / 3

  double frequency() const { return trials == 0 ? 0 : static_cast<double>(hits) / trials; }
  bool passed() const { return frequency() >= bound; }
};

// n = ceil(32 ln(6/delta)), event n/8 <= ||x||_1 <= 3n/4.
FactEvent fact_l1_concentration(double delta, std::size_t trials, std::uint64_t seed);
// n = ceil(18 ln(6/delta)), event sqrt(n)/2 <= ||x||_2 <= 3 sqrt(n)/2.
FactEvent fact_l2_concentration(double delta, std::size_t trials, std::uint64_t seed);
// |g| <= 4 sqrt(ln(1/delta)).
FactEvent fact_univariate_tail(double delta, std::size_t trials, std::uint64_t seed);

// E||x||_1 +- n/4 with E||x||_1 = sqrt(2/pi) n: the window the Lipschitz
// argument actually certifies. The upper end 3n/4 lies below the mean.
Interval l1_centered_interval(std::size_t n);

}  // namespace sketchrec

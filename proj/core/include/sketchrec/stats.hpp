#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sketchrec {

// Lower median: element of rank floor((m-1)/2). Reorders its argument.
double lower_median(std::span<double> values);

struct Interval {
  double lo;
  double hi;
};

// Wilson score interval for a binomial proportion at normal quantile z.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z);

inline constexpr double kZ95TwoSided = 1.959963984540054;
inline constexpr double kZ95OneSided = 1.6448536269514722;

double normal_cdf(double x);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

// Binomial standard deviation of a rate p over m trials.
double binomial_sigma(double p, std::size_t m);

}  // namespace sketchrec

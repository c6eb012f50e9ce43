#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace pam::stats {

double median(std::vector<double> values);
double mean(std::span<const double> values);

/// sup_x |F_n(x) - F(x)| for the empirical CDF of `samples` against `cdf`.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov p-value P(sqrt(n) D_n > sqrt(n) d).
double ks_pvalue(double distance, std::size_t n);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for a binomial proportion (z = 1.959964 for 95%).
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

/// Upper tail P(chi2_dof > statistic).
double chi_square_pvalue(double statistic, double dof);

struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

/// Pearson test of counts against probabilities; cells with expected count
/// below `min_expected` are pooled into one cell.
ChiSquareResult chi_square_test(std::span<const std::uint64_t> counts, std::span<const double> probs,
                                double min_expected = 5.0);

/// Half the L1 distance between an empirical histogram and a law.
double total_variation(std::span<const std::uint64_t> counts, std::span<const double> probs);

}  // namespace pam::stats

#include "pam/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>

#include "pam/errors.hpp"

namespace pam::stats {

double median(std::vector<double> values) {
  if (values.empty()) throw PreconditionError("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw PreconditionError("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw PreconditionError("KS distance of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < samples.size()) {
    // Step over runs of equal values so atoms are handled exactly.
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double f = cdf(samples[i]);
    d = std::max({d, std::abs(static_cast<double>(i) / n - f), std::abs(static_cast<double>(j) / n - f)});
    i = j;
  }
  return d;
}

double ks_pvalue(double distance, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * distance;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) throw PreconditionError("Wilson interval needs at least one trial");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double chi_square_pvalue(double statistic, double dof) {
  if (!(dof > 0)) throw PreconditionError("chi-square test needs positive degrees of freedom");
  const boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, std::max(0.0, statistic)));
}

ChiSquareResult chi_square_test(std::span<const std::uint64_t> counts, std::span<const double> probs,
                                double min_expected) {
  if (counts.size() != probs.size()) throw PreconditionError("chi-square: counts and probabilities differ in size");
  const double n = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  if (n == 0) throw PreconditionError("chi-square: no observations");
  ChiSquareResult r;
  double pooled_obs = 0.0;
  double pooled_exp = 0.0;
  int cells = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = n * probs[i];
    const double o = static_cast<double>(counts[i]);
    if (e < min_expected) {
      pooled_obs += o;
      pooled_exp += e;
      continue;
    }
    r.statistic += (o - e) * (o - e) / e;
    ++cells;
  }
  if (pooled_exp > 0.0) {
    r.statistic += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  }
  r.dof = cells - 1;
  r.p_value = r.dof > 0 ? chi_square_pvalue(r.statistic, r.dof) : 1.0;
  return r;
}

double total_variation(std::span<const std::uint64_t> counts, std::span<const double> probs) {
  if (counts.size() != probs.size()) throw PreconditionError("total variation: size mismatch");
  const double n = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  if (n == 0) throw PreconditionError("total variation: no observations");
  double tv = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) tv += std::abs(static_cast<double>(counts[i]) / n - probs[i]);
  return 0.5 * tv;
}

}  // namespace pam::stats

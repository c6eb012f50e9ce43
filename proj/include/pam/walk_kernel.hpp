#pragma once

#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "pam/lattice.hpp"

namespace pam {

/// One-step law kappa(y) on {y : |y| <= 1}. Steps are stored in lexicographic
/// order of their coordinates: for d=1 (-1, 0, +1); for d=2
/// ((-1,0), (0,-1), (0,0), (0,1), (1,0)); likewise for d=3.
class WalkKernel {
 public:
  static constexpr double kSumTolerance = 1e-12;

  int dim() const { return dim_; }
  std::size_t size() const { return steps_.size(); }
  std::span<const LatticeSite> steps() const { return steps_; }
  std::span<const double> probs() const { return probs_; }
  std::span<const double> log_probs() const { return log_probs_; }

  /// Position of step y in steps(); y must satisfy |y| <= 1.
  std::size_t step_index(const LatticeSite& y) const;
  double prob(const LatticeSite& y) const { return probs_[step_index(y)]; }
  double log_prob(const LatticeSite& y) const { return log_probs_[step_index(y)]; }

  /// kappa(0), the holding probability.
  double hold() const { return probs_[hold_index_]; }
  std::size_t hold_index() const { return hold_index_; }

 private:
  friend WalkKernel make_kernel(int d, std::span<const double> weights);

  int dim_ = 1;
  std::size_t hold_index_ = 0;
  std::vector<LatticeSite> steps_;
  std::vector<double> probs_;
  std::vector<double> log_probs_;
};

/// The 2d+1 steps with |y| <= 1 in lexicographic order.
std::vector<LatticeSite> unit_steps(int d);

/// Validates weights listed in unit_steps(d) order: nonnegative, strictly
/// positive on every step (hold and all unit moves), summing to 1 within 1e-12.
WalkKernel make_kernel(int d, std::span<const double> weights);
/// Same, keyed by step; every step with |y| <= 1 must be present and no other.
WalkKernel make_kernel(int d, const std::map<LatticeSite, double>& weights);
WalkKernel uniform_kernel(int d);

/// "uniform" or a comma-separated list of 2d+1 weights in unit_steps(d) order.
WalkKernel parse_kernel(std::string_view text, int d);

}  // namespace pam

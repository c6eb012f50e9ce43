#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pam/field.hpp"
#include "pam/walk_kernel.hpp"

namespace pam {

/// Hard cap on the number of enumerated paths.
inline constexpr std::uint64_t kMaxEnumeratedPaths = 1'000'000;

/// (2d+1)^N, saturating at UINT64_MAX.
std::uint64_t path_count(int d, int N);

/// Ground truth by walking every path of length N.
struct EnumerationResult {
  int N = 0;
  BallIndex ball;
  double logU = 0.0;
  std::vector<double> log_p;  // over B_N
  std::vector<LatticeSite> best_path;
  double best_log_weight = 0.0;
  std::uint64_t path_count = 0;
};

/// Visitor receives S_0..S_N and log[e^{H_N(S)} P(S)].
using PathVisitor = std::function<void(std::span<const LatticeSite> path, double log_weight)>;

/// Depth-first walk over all (2d+1)^N paths in kernel step order.
/// Throws CapacityError above kMaxEnumeratedPaths.
void for_each_path(const FieldRealization& field, const WalkKernel& kernel, int N, const PathVisitor& visit);

EnumerationResult enumerate_paths(const FieldRealization& field, const WalkKernel& kernel, int N);

struct OracleComparison {
  double max_log_p_abs = 0.0;  // max |log_p_dp - log_p_enum| over sites
  double max_log_p_rel = 0.0;  // same, divided by max(1, |log_p_enum|)
  double log_u_abs = 0.0;
  double log_u_rel = 0.0;
  std::uint64_t path_count = 0;

  double max_relative() const { return max_log_p_rel > log_u_rel ? max_log_p_rel : log_u_rel; }
};

OracleComparison compare_dp_vs_oracle(const FieldRealization& field, const WalkKernel& kernel, int N);

}  // namespace pam

#include "pam/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pam/errors.hpp"
#include "pam/logmath.hpp"
#include "pam/polymer.hpp"

namespace pam {

std::uint64_t path_count(int d, int N) {
  const std::uint64_t base = 2 * static_cast<std::uint64_t>(d) + 1;
  std::uint64_t count = 1;
  for (int i = 0; i < N; ++i) {
    if (count > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
    count *= base;
  }
  return count;
}

void for_each_path(const FieldRealization& field, const WalkKernel& kernel, int N, const PathVisitor& visit) {
  if (N < 0) throw PreconditionError("time horizon N must be nonnegative");
  if (kernel.dim() != field.dim()) throw PreconditionError("kernel and field dimensions differ");
  if (field.radius() < N) throw PreconditionError("field radius is smaller than N");
  const std::uint64_t count = path_count(field.dim(), N);
  if (count > kMaxEnumeratedPaths) {
    throw CapacityError("enumeration of " + std::to_string(count) + " paths (d=" + std::to_string(field.dim()) +
                        ", N=" + std::to_string(N) + ") exceeds the cap of " + std::to_string(kMaxEnumeratedPaths));
  }

  const std::size_t steps = kernel.size();
  std::vector<LatticeSite> path(static_cast<std::size_t>(N) + 1, LatticeSite::origin(field.dim()));
  std::vector<double> weight(static_cast<std::size_t>(N) + 1, 0.0);  // prefix log-weights
  std::vector<std::size_t> choice(static_cast<std::size_t>(N) + 1, 0);

  if (N == 0) {
    visit(path, 0.0);
    return;
  }
  // Iterative DFS; choice[i] is the step taken from time i-1 to i.
  std::size_t depth = 1;
  choice[1] = 0;
  while (depth > 0) {
    if (choice[depth] == steps) {
      --depth;
      if (depth > 0) ++choice[depth];
      continue;
    }
    const std::size_t s = choice[depth];
    path[depth] = path[depth - 1] + kernel.steps()[s];
    weight[depth] = weight[depth - 1] + kernel.log_probs()[s] + field(path[depth]);
    if (depth == static_cast<std::size_t>(N)) {
      visit(path, weight[depth]);
      ++choice[depth];
    } else {
      ++depth;
      choice[depth] = 0;
    }
  }
}

EnumerationResult enumerate_paths(const FieldRealization& field, const WalkKernel& kernel, int N) {
  EnumerationResult result;
  result.N = N;
  result.ball = BallIndex(field.dim(), std::max(N, 0));
  std::vector<LogAccumulator> per_site(result.ball.size());
  result.best_log_weight = kNegInf;
  for_each_path(field, kernel, N, [&](std::span<const LatticeSite> path, double lw) {
    per_site[result.ball.index_of(path.back())].add(lw);
    ++result.path_count;
    if (lw > result.best_log_weight) {
      result.best_log_weight = lw;
      result.best_path.assign(path.begin(), path.end());
    }
  });
  std::vector<double> logu(per_site.size());
  for (std::size_t i = 0; i < per_site.size(); ++i) logu[i] = per_site[i].value();
  result.logU = log_sum_exp(logu);
  result.log_p.resize(logu.size());
  for (std::size_t i = 0; i < logu.size(); ++i) result.log_p[i] = logu[i] - result.logU;
  return result;
}

OracleComparison compare_dp_vs_oracle(const FieldRealization& field, const WalkKernel& kernel, int N) {
  const EnumerationResult truth = enumerate_paths(field, kernel, N);
  const EndpointLaw law = endpoint_law(final_front(field, kernel, N));
  OracleComparison cmp;
  cmp.path_count = truth.path_count;
  const auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  for (std::size_t i = 0; i < truth.log_p.size(); ++i) {
    const double a = law.log_p[i];
    const double b = truth.log_p[i];
    if (a == kNegInf && b == kNegInf) continue;
    if (a == kNegInf || b == kNegInf) {
      cmp.max_log_p_abs = cmp.max_log_p_rel = std::numeric_limits<double>::infinity();
      continue;
    }
    cmp.max_log_p_abs = std::max(cmp.max_log_p_abs, std::abs(a - b));
    cmp.max_log_p_rel = std::max(cmp.max_log_p_rel, rel(a, b));
  }
  cmp.log_u_abs = std::abs(law.logU - truth.logU);
  cmp.log_u_rel = rel(law.logU, truth.logU);
  return cmp;
}

}  // namespace pam

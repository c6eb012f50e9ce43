#include "pam/walk_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pam/errors.hpp"
#include "pam/io.hpp"

namespace pam {

std::vector<LatticeSite> unit_steps(int d) {
  std::vector<LatticeSite> steps;
  steps.push_back(LatticeSite::origin(d));
  for (int axis = 0; axis < d; ++axis) {
    for (int s : {-1, 1}) {
      std::array<int, kMaxDim> c{};
      c[static_cast<std::size_t>(axis)] = s;
      steps.emplace_back(std::span<const int>(c.data(), static_cast<std::size_t>(d)));
    }
  }
  std::sort(steps.begin(), steps.end());
  return steps;
}

std::size_t WalkKernel::step_index(const LatticeSite& y) const {
  const auto it = std::lower_bound(steps_.begin(), steps_.end(), y);
  if (it == steps_.end() || !(*it == y)) throw PreconditionError("step " + y.to_string() + " is not a kernel step");
  return static_cast<std::size_t>(it - steps_.begin());
}

WalkKernel make_kernel(int d, std::span<const double> weights) {
  WalkKernel k;
  k.dim_ = d;
  k.steps_ = unit_steps(d);
  if (weights.size() != k.steps_.size()) {
    throw PreconditionError("kernel for d=" + std::to_string(d) + " needs " + std::to_string(k.steps_.size()) +
                            " weights, got " + std::to_string(weights.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    const std::string step = k.steps_[i].to_string();
    if (!std::isfinite(w) || w < 0.0) throw PreconditionError("kernel weight of step " + step + " is negative or not finite");
    if (w == 0.0) {
      throw PreconditionError("kernel weight of step " + step +
                              " is zero; the walk needs kappa(0) > 0 and kappa(y) > 0 for |y| = 1");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > WalkKernel::kSumTolerance) {
    throw PreconditionError("kernel weights sum to " + format_double(sum) + ", expected 1");
  }
  k.probs_.assign(weights.begin(), weights.end());
  for (double w : k.probs_) k.log_probs_.push_back(std::log(w));
  k.hold_index_ = k.step_index(LatticeSite::origin(d));
  return k;
}

WalkKernel make_kernel(int d, const std::map<LatticeSite, double>& weights) {
  const auto steps = unit_steps(d);
  std::vector<double> w;
  for (const auto& y : steps) {
    const auto it = weights.find(y);
    if (it == weights.end()) throw PreconditionError("kernel weight missing for step " + y.to_string());
    w.push_back(it->second);
  }
  if (weights.size() != steps.size()) throw PreconditionError("kernel weights given outside {|y| <= 1}");
  return make_kernel(d, w);
}

WalkKernel uniform_kernel(int d) {
  const std::size_t n = 2 * static_cast<std::size_t>(d) + 1;
  return make_kernel(d, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

WalkKernel parse_kernel(std::string_view text, int d) {
  if (text == "uniform") return uniform_kernel(d);
  std::vector<double> weights;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string token(text.substr(pos, comma - pos));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != token.size()) throw PreconditionError("cannot parse kernel weight '" + token + "'");
    weights.push_back(v);
    pos = comma + 1;
  }
  return make_kernel(d, weights);
}

}  // namespace pam

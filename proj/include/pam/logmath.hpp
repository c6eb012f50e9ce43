#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace pam {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(e^a + e^b); -inf is absorbing.
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

// Max-subtracted log-sum-exp. Empty input or all -inf gives -inf.
inline double log_sum_exp(std::span<const double> values) {
  double m = kNegInf;
  for (double v : values) m = std::max(m, v);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

// Streaming log-sum-exp accumulator.
class LogAccumulator {
 public:
  void add(double v) {
    if (v == kNegInf) return;
    if (v <= max_) {
      sum_ += std::exp(v - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - v) + 1.0;
      max_ = v;
    }
  }
  double value() const { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

}  // namespace pam

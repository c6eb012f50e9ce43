#include <algorithm>
#include <cmath>

#include "pam/logmath.hpp"
#include "pam/simd/kernels.hpp"

namespace pam::simd::detail {

namespace {

void max_shifted(std::span<double> m, std::span<const double> src, double shift) {
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::max(m[i], src[i] + shift);
}

void accumulate_exp(std::span<double> s, std::span<const double> m, std::span<const double> src, double shift) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (src[i] != kNegInf) s[i] += std::exp(src[i] + shift - m[i]);
  }
}

void finalize_log(std::span<double> out, std::span<const double> m, std::span<const double> s,
                  std::span<const double> base) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = m[i] == kNegInf ? kNegInf : base[i] + m[i] + std::log(s[i]);
  }
}

void exp_inplace(std::span<double> v) {
  for (double& x : v) x = std::exp(x);
}

void log_inplace(std::span<double> v) {
  for (double& x : v) x = std::log(x);
}

}  // namespace

const RowKernels& scalar_kernels() {
  static const RowKernels k{max_shifted, accumulate_exp, finalize_log, exp_inplace, log_inplace};
  return k;
}

}  // namespace pam::simd::detail

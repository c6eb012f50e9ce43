#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Row kernels for the log-domain transfer step. Every DP update is a sum of
// shifted rows, so the hot loop is three passes over contiguous arrays:
//
//   max pass:     m[i]  = max(m[i], src[i] + shift)
//   exp pass:     s[i] += exp(src[i] + shift - m[i])
//   finalize:     out[i] = base[i] + m[i] + log(s[i])   (-inf where m is -inf)
//
// The scalar backend is the reference; vector backends must agree with it to
// a few ulp (see tests/test_simd_kernels.cpp).

namespace pam::simd {

enum class Backend { kScalar, kAvx2 };

struct RowKernels {
  void (*max_shifted)(std::span<double> m, std::span<const double> src, double shift);
  void (*accumulate_exp)(std::span<double> s, std::span<const double> m, std::span<const double> src,
                         double shift);
  void (*finalize_log)(std::span<double> out, std::span<const double> m, std::span<const double> s,
                       std::span<const double> base);
  // Elementwise exp / log, exposed for accuracy tests.
  void (*exp_inplace)(std::span<double> v);
  void (*log_inplace)(std::span<double> v);
};

bool backend_supported(Backend b);
std::string_view backend_name(Backend b);

/// Kernels of a specific backend. Throws PreconditionError if unsupported on this CPU.
const RowKernels& kernels(Backend b);

/// Backend used by the DP. Defaults to the widest supported one; the
/// environment variable PAM_SIMD=scalar forces the reference path.
Backend active_backend();
void set_active_backend(Backend b);

inline const RowKernels& active_kernels() { return kernels(active_backend()); }

namespace detail {
const RowKernels& scalar_kernels();
const RowKernels& avx2_kernels();
}  // namespace detail

}  // namespace pam::simd

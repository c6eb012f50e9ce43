#include <atomic>
#include <cstdlib>
#include <string>

#include "pam/errors.hpp"
#include "pam/simd/kernels.hpp"

namespace pam::simd {

namespace {

Backend detect() {
  if (const char* env = std::getenv("PAM_SIMD"); env != nullptr && std::string(env) == "scalar") {
    return Backend::kScalar;
  }
  return backend_supported(Backend::kAvx2) ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend>& active() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

}  // namespace

bool backend_supported(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#if defined(PAM_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
  }
  return "unknown";
}

const RowKernels& kernels(Backend b) {
  if (!backend_supported(b)) {
    throw PreconditionError("SIMD backend " + std::string(backend_name(b)) + " is not supported on this CPU");
  }
  switch (b) {
    case Backend::kAvx2:
#if defined(PAM_HAVE_AVX2)
      return detail::avx2_kernels();
#else
      break;
#endif
    case Backend::kScalar:
      break;
  }
  return detail::scalar_kernels();
}

Backend active_backend() { return active().load(std::memory_order_relaxed); }

void set_active_backend(Backend b) {
  kernels(b);
  active().store(b, std::memory_order_relaxed);
}

}  // namespace pam::simd

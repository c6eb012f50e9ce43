#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "pam/field.hpp"
#include "pam/logmath.hpp"
#include "pam/polymer.hpp"
#include "pam/simd/kernels.hpp"

using namespace pam;
using simd::Backend;

namespace {

bool close(double a, double b, double rel) {
  if (a == b) return true;
  if (std::isinf(a) || std::isinf(b) || std::isnan(a) || std::isnan(b)) return false;
  return std::abs(a - b) <= rel * std::max(1.0, std::abs(b));
}

std::vector<Backend> vector_backends() {
  std::vector<Backend> out;
  if (simd::backend_supported(Backend::kAvx2)) out.push_back(Backend::kAvx2);
  return out;
}

// Random log-weights with a sprinkling of -inf entries.
std::vector<double> random_logs(std::mt19937_64& gen, std::size_t n, double lo, double hi, double p_neg_inf) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::bernoulli_distribution dead(p_neg_inf);
  std::vector<double> v(n);
  for (auto& x : v) x = dead(gen) ? kNegInf : u(gen);
  return v;
}

class BackendGuard {
 public:
  explicit BackendGuard(Backend b) : saved_(simd::active_backend()) { simd::set_active_backend(b); }
  ~BackendGuard() { simd::set_active_backend(saved_); }

 private:
  Backend saved_;
};

}  // namespace

TEST_CASE("backend registry") {
  CHECK(simd::backend_supported(Backend::kScalar));
  CHECK(simd::backend_name(Backend::kScalar) == "scalar");
  MESSAGE("active backend: " << simd::backend_name(simd::active_backend()));
}

TEST_CASE("vector exp and log match the scalar reference") {
  std::mt19937_64 gen(1);
  for (Backend b : vector_backends()) {
    const auto& vk = simd::kernels(b);
    std::vector<double> x = random_logs(gen, 10001, -700.0, 700.0, 0.0);
    x.push_back(0.0);
    x.push_back(-1e-300);
    x.push_back(kNegInf);
    auto ref = x;
    auto got = x;
    simd::kernels(Backend::kScalar).exp_inplace(ref);
    vk.exp_inplace(got);
    for (std::size_t i = 0; i < x.size(); ++i) {
      INFO("exp(" << x[i] << ")");
      CHECK(close(got[i], ref[i], 4e-16));
    }

    std::uniform_real_distribution<double> e(-300.0, 300.0);
    std::vector<double> y(9999);
    for (auto& v : y) v = std::pow(10.0, e(gen));
    y.push_back(1.0);
    y.push_back(0.0);
    y.push_back(std::nextafter(1.0, 2.0));
    auto lref = y;
    auto lgot = y;
    simd::kernels(Backend::kScalar).log_inplace(lref);
    vk.log_inplace(lgot);
    for (std::size_t i = 0; i < y.size(); ++i) {
      INFO("log(" << y[i] << ")");
      CHECK((lgot[i] == lref[i] || std::abs(lgot[i] - lref[i]) <= 4e-16 * std::max(1.0, std::abs(lref[i]))));
    }
  }
}

TEST_CASE("row kernels agree with the scalar reference") {
  std::mt19937_64 gen(2);
  const auto& ref = simd::kernels(Backend::kScalar);
  for (Backend b : vector_backends()) {
    const auto& vk = simd::kernels(b);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u, 1001u}) {
      const auto base = random_logs(gen, n, -5.0, 50.0, 0.0);
      std::vector<std::vector<double>> srcs;
      for (int j = 0; j < 3; ++j) srcs.push_back(random_logs(gen, n, -800.0, 900.0, 0.2));
      const double shifts[3] = {std::log(0.2), std::log(0.5), std::log(0.3)};

      std::vector<double> m_ref(n, kNegInf), m_vec(n, kNegInf), s_ref(n, 0.0), s_vec(n, 0.0);
      for (int j = 0; j < 3; ++j) {
        ref.max_shifted(m_ref, srcs[j], shifts[j]);
        vk.max_shifted(m_vec, srcs[j], shifts[j]);
      }
      CHECK(m_ref == m_vec);
      for (int j = 0; j < 3; ++j) {
        ref.accumulate_exp(s_ref, m_ref, srcs[j], shifts[j]);
        vk.accumulate_exp(s_vec, m_vec, srcs[j], shifts[j]);
      }
      std::vector<double> out_ref(n), out_vec(n);
      ref.finalize_log(out_ref, m_ref, s_ref, base);
      vk.finalize_log(out_vec, m_vec, s_vec, base);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(close(s_vec[i], s_ref[i], 1e-15));
        CHECK(close(out_vec[i], out_ref[i], 1e-15));
      }
    }
  }
}

TEST_CASE("full recursion is backend independent") {
  for (Backend b : vector_backends()) {
    for (int d = 1; d <= 3; ++d) {
      const int N = d == 1 ? 300 : (d == 2 ? 40 : 12);
      const auto field = sample_pareto_field(11 + static_cast<std::uint64_t>(d), 1.0, BallIndex(d, N));
      const auto kernel = uniform_kernel(d);
      LogWeightFront scalar_front;
      {
        BackendGuard g(Backend::kScalar);
        scalar_front = final_front(field, kernel, N);
      }
      LogWeightFront vec_front;
      {
        BackendGuard g(b);
        vec_front = final_front(field, kernel, N);
      }
      REQUIRE(scalar_front.logw.size() == vec_front.logw.size());
      double worst = 0.0;
      for (std::size_t i = 0; i < vec_front.logw.size(); ++i) {
        worst = std::max(worst, std::abs(vec_front.logw[i] - scalar_front.logw[i]) /
                                    std::max(1.0, std::abs(scalar_front.logw[i])));
      }
      MESSAGE("d=" << d << " N=" << N << " max relative difference " << worst);
      CHECK(worst < 1e-13);
    }
  }
}

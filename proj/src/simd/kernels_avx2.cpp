// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>

#include "pam/logmath.hpp"
#include "pam/simd/kernels.hpp"

namespace pam::simd::detail {

namespace {

constexpr std::size_t kLanes = 4;

// exp(x), Cody-Waite reduction by ln2 and a degree-13 Taylor polynomial on
// |r| <= ln2/2. Inputs below -708.39 (including -inf) give 0; inputs are
// clamped at 709 from above.
inline __m256d exp_pd(__m256d x) {
  const __m256d underflow = _mm256_cmp_pd(x, _mm256_set1_pd(-708.39), _CMP_LT_OQ);
  x = _mm256_max_pd(x, _mm256_set1_pd(-708.39));
  x = _mm256_min_pd(x, _mm256_set1_pd(709.0));

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(1.90821492927058770002e-10), r);

  static constexpr std::array<double, 14> kInvFact = {
      1.0,
      1.0,
      1.0 / 2,
      1.0 / 6,
      1.0 / 24,
      1.0 / 120,
      1.0 / 720,
      1.0 / 5040,
      1.0 / 40320,
      1.0 / 362880,
      1.0 / 3628800,
      1.0 / 39916800,
      1.0 / 479001600,
      1.0 / 6227020800.0,
  };
  __m256d p = _mm256_set1_pd(kInvFact[13]);
  for (int i = 12; i >= 0; --i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kInvFact[static_cast<std::size_t>(i)]));

  // 2^k: k + 1.5*2^52 carries k in its low mantissa bits.
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  __m256i ki = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(k, magic)), _mm256_castpd_si256(magic));
  ki = _mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52);
  const __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(ki));
  return _mm256_andnot_pd(underflow, result);
}

// log(x) for positive normal x (subnormals are not handled): x = 2^e m with m in [sqrt(1/2), sqrt(2)),
// log m = 2 atanh((m-1)/(m+1)) summed to f^21.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i exp_field = _mm256_srli_epi64(bits, 52);
  const __m256d two52 = _mm256_set1_pd(4503599627370496.0);
  __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(exp_field, _mm256_castpd_si256(two52))), two52);
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));

  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d f = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d f2 = _mm256_mul_pd(f, f);
  __m256d p = _mm256_set1_pd(1.0 / 21);
  for (int j = 19; j >= 1; j -= 2) p = _mm256_fmadd_pd(p, f2, _mm256_set1_pd(1.0 / j));
  const __m256d log_m = _mm256_mul_pd(_mm256_add_pd(f, f), p);

  __m256d result = _mm256_fmadd_pd(e, _mm256_set1_pd(1.90821492927058770002e-10), log_m);
  result = _mm256_fmadd_pd(e, _mm256_set1_pd(6.93147180369123816490e-01), result);

  // log(0) = -inf, log(+inf) = +inf; negative and NaN inputs give NaN.
  result = _mm256_blendv_pd(result, _mm256_set1_pd(kNegInf), _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_EQ_OQ));
  result = _mm256_blendv_pd(result, x, _mm256_cmp_pd(x, _mm256_set1_pd(std::numeric_limits<double>::infinity()), _CMP_EQ_OQ));
  const __m256d bad = _mm256_or_pd(_mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_LT_OQ), _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
  return _mm256_blendv_pd(result, _mm256_set1_pd(__builtin_nan("")), bad);
}

// Runs `body(offset, count)` on full 4-lane blocks, then once on the tail
// through zero-padded scratch buffers so every element takes the same path.
template <std::size_t NumIn, std::size_t NumOut, typename Body>
inline void for_blocks(std::size_t n, const std::array<const double*, NumIn>& in,
                       const std::array<double*, NumOut>& out, std::array<double, NumIn> pad_in, Body body) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    std::array<const double*, NumIn> pin{};
    std::array<double*, NumOut> pout{};
    for (std::size_t j = 0; j < NumIn; ++j) pin[j] = in[j] + i;
    for (std::size_t j = 0; j < NumOut; ++j) pout[j] = out[j] + i;
    body(pin, pout);
  }
  if (i == n) return;
  const std::size_t rest = n - i;
  std::array<std::array<double, kLanes>, NumIn> bin{};
  std::array<std::array<double, kLanes>, NumOut> bout{};
  std::array<const double*, NumIn> pin{};
  std::array<double*, NumOut> pout{};
  for (std::size_t j = 0; j < NumIn; ++j) {
    bin[j].fill(pad_in[j]);
    std::copy_n(in[j] + i, rest, bin[j].begin());
    pin[j] = bin[j].data();
  }
  for (std::size_t j = 0; j < NumOut; ++j) pout[j] = bout[j].data();
  body(pin, pout);
  for (std::size_t j = 0; j < NumOut; ++j) std::copy_n(bout[j].begin(), rest, out[j] + i);
}

void max_shifted(std::span<double> m, std::span<const double> src, double shift) {
  const __m256d vs = _mm256_set1_pd(shift);
  for_blocks<2, 1>(m.size(), {m.data(), src.data()}, {m.data()}, {kNegInf, kNegInf}, [&](auto in, auto out) {
    const __m256d cur = _mm256_loadu_pd(in[0]);
    const __m256d cand = _mm256_add_pd(_mm256_loadu_pd(in[1]), vs);
    // Ordered compare keeps the current value when both are -inf.
    _mm256_storeu_pd(out[0], _mm256_blendv_pd(cur, cand, _mm256_cmp_pd(cand, cur, _CMP_GT_OQ)));
  });
}

void accumulate_exp(std::span<double> s, std::span<const double> m, std::span<const double> src, double shift) {
  const __m256d vs = _mm256_set1_pd(shift);
  const __m256d ninf = _mm256_set1_pd(kNegInf);
  for_blocks<3, 1>(s.size(), {s.data(), m.data(), src.data()}, {s.data()}, {0.0, 0.0, kNegInf},
                   [&](auto in, auto out) {
                     const __m256d x = _mm256_loadu_pd(in[2]);
                     const __m256d live = _mm256_cmp_pd(x, ninf, _CMP_NEQ_OQ);
                     // Dead lanes may have m = -inf; feed exp a -inf instead of NaN.
                     const __m256d arg =
                         _mm256_blendv_pd(ninf, _mm256_sub_pd(_mm256_add_pd(x, vs), _mm256_loadu_pd(in[1])), live);
                     _mm256_storeu_pd(out[0], _mm256_add_pd(_mm256_loadu_pd(in[0]), exp_pd(arg)));
                   });
}

void finalize_log(std::span<double> out_span, std::span<const double> m, std::span<const double> s,
                  std::span<const double> base) {
  const __m256d ninf = _mm256_set1_pd(kNegInf);
  for_blocks<3, 1>(out_span.size(), {m.data(), s.data(), base.data()}, {out_span.data()}, {kNegInf, 1.0, 0.0},
                   [&](auto in, auto out) {
                     const __m256d vm = _mm256_loadu_pd(in[0]);
                     const __m256d dead = _mm256_cmp_pd(vm, ninf, _CMP_EQ_OQ);
                     const __m256d vs = _mm256_blendv_pd(_mm256_loadu_pd(in[1]), _mm256_set1_pd(1.0), dead);
                     const __m256d r = _mm256_add_pd(_mm256_add_pd(_mm256_loadu_pd(in[2]), vm), log_pd(vs));
                     _mm256_storeu_pd(out[0], _mm256_blendv_pd(r, ninf, dead));
                   });
}

void exp_inplace(std::span<double> v) {
  for_blocks<1, 1>(v.size(), {v.data()}, {v.data()}, {0.0},
                   [](auto in, auto out) { _mm256_storeu_pd(out[0], exp_pd(_mm256_loadu_pd(in[0]))); });
}

void log_inplace(std::span<double> v) {
  for_blocks<1, 1>(v.size(), {v.data()}, {v.data()}, {1.0},
                   [](auto in, auto out) { _mm256_storeu_pd(out[0], log_pd(_mm256_loadu_pd(in[0]))); });
}

}  // namespace

const RowKernels& avx2_kernels() {
  static const RowKernels k{max_shifted, accumulate_exp, finalize_log, exp_inplace, log_inplace};
  return k;
}

}  // namespace pam::simd::detail

#include <immintrin.h>

#include <cstddef>

#include "mfpof/simd/kernels.hpp"

namespace mfpof::simd {

namespace {

// exp(x) for x <= 0. Cody-Waite reduction to |r| <= ln2/2, then a degree-13
// Taylor polynomial; results below exp(-708) flush to zero.
inline __m256d exp_nonpositive(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d lower = _mm256_set1_pd(-708.0);

  const __m256d underflow = _mm256_cmp_pd(x, lower, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lower);

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  static constexpr double kCoef[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
      1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,
      1.0 / 6.0,          0.5,               1.0,              1.0};
  __m256d p = _mm256_set1_pd(kCoef[0]);
  for (std::size_t i = 1; i < sizeof(kCoef) / sizeof(kCoef[0]); ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kCoef[i]));

  // 2^k by writing the biased exponent; k >= -1022 after the clamp above.
  const __m128i ki = _mm256_cvtpd_epi32(k);
  const __m256i k64 = _mm256_cvtepi32_epi64(ki);
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  const __m256d scale = _mm256_castsi256_pd(bits);
  const __m256d result = _mm256_mul_pd(p, scale);
  return _mm256_andnot_pd(underflow, result);
}

inline __m256d matern52_corr(__m256d r2) {
  const __m256d s = _mm256_sqrt_pd(_mm256_mul_pd(_mm256_set1_pd(5.0), r2));
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d poly = _mm256_add_pd(_mm256_add_pd(one, s), _mm256_div_pd(_mm256_mul_pd(s, s), _mm256_set1_pd(3.0)));
  const __m256d e = exp_nonpositive(_mm256_sub_pd(_mm256_setzero_pd(), s));
  return _mm256_mul_pd(poly, e);
}

inline __m256d squared_distance(const double* q, const double* x, std::size_t ld, std::size_t d, std::size_t j,
                                __m256i mask) {
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t k = 0; k < d; ++k) {
    const __m256d h = _mm256_sub_pd(_mm256_set1_pd(q[k]), _mm256_maskload_pd(x + k * ld + j, mask));
    acc = _mm256_fmadd_pd(h, h, acc);
  }
  return acc;
}

}  // namespace

void matern_row_avx2(const MaternRowTask& t) {
  const __m256d a0 = _mm256_set1_pd(t.a0);
  const __m256i lane = _mm256_set_epi64x(3, 2, 1, 0);
  const std::size_t ld = t.ld == 0 ? t.n : t.ld;
  for (std::size_t j = 0; j < t.n; j += 4) {
    const auto remaining = static_cast<long long>(t.n - j);
    const __m256i mask = _mm256_cmpgt_epi64(_mm256_set1_epi64x(remaining), lane);
    __m256d value = _mm256_mul_pd(a0, matern52_corr(squared_distance(t.q0, t.x0, ld, t.d, j, mask)));
    if (t.fe != nullptr) {
      const __m256d ce = matern52_corr(squared_distance(t.qe, t.xe, ld, t.d, j, mask));
      value = _mm256_fmadd_pd(_mm256_maskload_pd(t.fe + j, mask), ce, value);
    }
    _mm256_maskstore_pd(t.out + j, mask, value);
  }
}

}  // namespace mfpof::simd

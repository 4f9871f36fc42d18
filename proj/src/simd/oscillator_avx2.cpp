#include <immintrin.h>

#include "mfpof/simd/kernels.hpp"

// Built without FMA contraction: results must match the scalar kernel bit for bit.

namespace mfpof::simd {

void oscillator_advance_avx2(OscillatorLanes& s, const double* n1, const double* n2, std::size_t steps) {
  const __m256d e00 = _mm256_load_pd(s.e00), e01 = _mm256_load_pd(s.e01);
  const __m256d e10 = _mm256_load_pd(s.e10), e11 = _mm256_load_pd(s.e11);
  const __m256d l00 = _mm256_load_pd(s.l00), l10 = _mm256_load_pd(s.l10), l11 = _mm256_load_pd(s.l11);
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d x = _mm256_load_pd(s.x);
  __m256d v = _mm256_load_pd(s.v);
  __m256d peak = _mm256_load_pd(s.peak);
  constexpr std::size_t w = OscillatorLanes::kWidth;
  if (s.two_noises) {
    for (std::size_t i = 0; i < steps; ++i) {
      const __m256d a = _mm256_loadu_pd(n1 + i * w);
      const __m256d b = _mm256_loadu_pd(n2 + i * w);
      __m256d nx = _mm256_add_pd(_mm256_mul_pd(e00, x), _mm256_mul_pd(e01, v));
      __m256d nv = _mm256_add_pd(_mm256_mul_pd(e10, x), _mm256_mul_pd(e11, v));
      nx = _mm256_add_pd(nx, _mm256_mul_pd(l00, a));
      nv = _mm256_add_pd(nv, _mm256_mul_pd(l10, a));
      nv = _mm256_add_pd(nv, _mm256_mul_pd(l11, b));
      x = nx;
      v = nv;
      peak = _mm256_max_pd(_mm256_andnot_pd(sign, x), peak);
    }
  } else {
    for (std::size_t i = 0; i < steps; ++i) {
      const __m256d a = _mm256_loadu_pd(n1 + i * w);
      const __m256d nx = _mm256_add_pd(_mm256_mul_pd(e00, x), _mm256_mul_pd(e01, v));
      __m256d nv = _mm256_add_pd(_mm256_mul_pd(e10, x), _mm256_mul_pd(e11, v));
      nv = _mm256_add_pd(nv, _mm256_mul_pd(l10, a));
      x = nx;
      v = nv;
      peak = _mm256_max_pd(_mm256_andnot_pd(sign, x), peak);
    }
  }
  _mm256_store_pd(s.x, x);
  _mm256_store_pd(s.v, v);
  _mm256_store_pd(s.peak, peak);
}

}  // namespace mfpof::simd

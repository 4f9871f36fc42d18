#include <algorithm>
#include <cmath>

#include "mfpof/simd/kernels.hpp"

namespace mfpof::simd {

namespace {

inline double matern52_corr(double r2) {
  const double s = std::sqrt(5.0 * r2);
  return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

}  // namespace

void matern_row_scalar(const MaternRowTask& t) {
  const std::size_t ld = t.ld == 0 ? t.n : t.ld;
  for (std::size_t j = 0; j < t.n; ++j) {
    double r0 = 0.0;
    for (std::size_t k = 0; k < t.d; ++k) {
      const double h = t.q0[k] - t.x0[k * ld + j];
      r0 += h * h;
    }
    double value = t.a0 * matern52_corr(r0);
    if (t.fe != nullptr) {
      double re = 0.0;
      for (std::size_t k = 0; k < t.d; ++k) {
        const double h = t.qe[k] - t.xe[k * ld + j];
        re += h * h;
      }
      value += t.fe[j] * matern52_corr(re);
    }
    t.out[j] = value;
  }
}

void oscillator_advance_scalar(OscillatorLanes& s, const double* n1, const double* n2, std::size_t steps) {
  constexpr std::size_t w = OscillatorLanes::kWidth;
  for (std::size_t lane = 0; lane < s.active && lane < w; ++lane) {
    double x = s.x[lane];
    double v = s.v[lane];
    double peak = s.peak[lane];
    const double e00 = s.e00[lane], e01 = s.e01[lane], e10 = s.e10[lane], e11 = s.e11[lane];
    const double l00 = s.l00[lane], l10 = s.l10[lane], l11 = s.l11[lane];
    for (std::size_t i = 0; i < steps; ++i) {
      const double a = n1[i * w + lane];
      double nx = e00 * x + e01 * v;
      double nv = e10 * x + e11 * v;
      if (s.two_noises) {
        const double b = n2[i * w + lane];
        nx = nx + l00 * a;
        nv = nv + l10 * a;
        nv = nv + l11 * b;
      } else {
        nv = nv + l10 * a;
      }
      x = nx;
      v = nv;
      peak = std::max(peak, std::fabs(x));
    }
    s.x[lane] = x;
    s.v[lane] = v;
    s.peak[lane] = peak;
  }
}

}  // namespace mfpof::simd

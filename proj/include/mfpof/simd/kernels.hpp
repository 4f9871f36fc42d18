#pragma once

// Data-parallel inner loops with a scalar reference and vectorized variants.
// The dispatched entry points pick a variant once at startup based on CPU
// support; the per-variant functions are exported for equivalence tests.

#include <cstddef>

namespace mfpof::simd {

enum class Isa { kScalar, kAvx2 };

[[nodiscard]] const char* isa_name(Isa isa) noexcept;
/// Best variant the running CPU supports (and the build includes).
[[nodiscard]] Isa detected_isa() noexcept;
/// Variant currently used by the dispatched kernels. Defaults to detected_isa()
/// unless the MFPOF_SIMD environment variable is set to "scalar".
[[nodiscard]] Isa active_isa() noexcept;
/// Forces a variant; requests above detected_isa() are clamped.
void set_active_isa(Isa isa) noexcept;

/// One row of a two-part Matérn 5/2 cross-covariance:
///   out[j] = a0 * M(|q0 - x0_j|) + fe[j] * M(|qe - xe_j|)
/// where M is the Matérn 5/2 correlation. Coordinates are pre-divided by the
/// range parameters and stored dimension-major (x0[k * ld + j]). When fe is
/// null the second term is omitted.
struct MaternRowTask {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t ld = 0;  // stride between dimensions of x0/xe; 0 means n
  const double* q0 = nullptr;
  const double* x0 = nullptr;
  const double* qe = nullptr;
  const double* xe = nullptr;
  double a0 = 0.0;
  const double* fe = nullptr;
  double* out = nullptr;
};

void matern_row(const MaternRowTask& task);
void matern_row_scalar(const MaternRowTask& task);
#if defined(MFPOF_HAVE_AVX2)
void matern_row_avx2(const MaternRowTask& task);
#endif

/// Four independent linear-oscillator paths advanced in lock-step.
/// Each lane holds its propagator exp(A dt) = [[e00, e01], [e10, e11]] and the
/// lower-triangular noise loading [[l00, 0], [l10, l11]].
///
/// Per step, per lane (in this exact operation order):
///   x' = e00*x + e01*v            (+ l00*n1 when two_noises)
///   v' = (e10*x + e11*v) + l10*n1 (+ l11*n2 when two_noises)
///   peak = max(peak, |x'|)
/// Noise buffers are step-major: n1[step * 4 + lane].
struct OscillatorLanes {
  static constexpr std::size_t kWidth = 4;
  alignas(32) double e00[kWidth]{};
  alignas(32) double e01[kWidth]{};
  alignas(32) double e10[kWidth]{};
  alignas(32) double e11[kWidth]{};
  alignas(32) double l00[kWidth]{};
  alignas(32) double l10[kWidth]{};
  alignas(32) double l11[kWidth]{};
  alignas(32) double x[kWidth]{};
  alignas(32) double v[kWidth]{};
  alignas(32) double peak[kWidth]{};
  bool two_noises = false;
  /// Lanes the scalar kernel advances; the vector kernel always runs all four.
  std::size_t active = kWidth;
};

void oscillator_advance(OscillatorLanes& lanes, const double* n1, const double* n2, std::size_t steps);
void oscillator_advance_scalar(OscillatorLanes& lanes, const double* n1, const double* n2, std::size_t steps);
#if defined(MFPOF_HAVE_AVX2)
void oscillator_advance_avx2(OscillatorLanes& lanes, const double* n1, const double* n2, std::size_t steps);
#endif

}  // namespace mfpof::simd

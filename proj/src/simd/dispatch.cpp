#include <atomic>
#include <cstdlib>
#include <cstring>

#include "mfpof/simd/kernels.hpp"

namespace mfpof::simd {

namespace {

Isa initial_isa() noexcept {
  const char* env = std::getenv("MFPOF_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::kScalar;
  return detected_isa();
}

std::atomic<Isa>& active() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

const char* isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

Isa detected_isa() noexcept {
#if defined(MFPOF_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::kAvx2;
#endif
  return Isa::kScalar;
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) noexcept {
  if (isa == Isa::kAvx2 && detected_isa() != Isa::kAvx2) isa = Isa::kScalar;
  active().store(isa, std::memory_order_relaxed);
}

void matern_row(const MaternRowTask& task) {
#if defined(MFPOF_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) return matern_row_avx2(task);
#endif
  matern_row_scalar(task);
}

void oscillator_advance(OscillatorLanes& lanes, const double* n1, const double* n2, std::size_t steps) {
#if defined(MFPOF_HAVE_AVX2)
  if (active_isa() == Isa::kAvx2) return oscillator_advance_avx2(lanes, n1, n2, steps);
#endif
  oscillator_advance_scalar(lanes, n1, n2, steps);
}

}  // namespace mfpof::simd

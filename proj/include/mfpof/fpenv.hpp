#pragma once

#if defined(__SSE2__) || defined(__x86_64__)
#include <xmmintrin.h>
#define MFPOF_HAVE_MXCSR 1
#endif

namespace mfpof {

/// Flushes subnormal operands and results to zero for the current thread while
/// in scope. Covariances between distant points underflow into the subnormal
/// range, where a dense factorization slows down several-fold.
class FlushDenormals {
 public:
#if defined(MFPOF_HAVE_MXCSR)
  FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | kFtz | kDaz); }
  ~FlushDenormals() { _mm_setcsr(saved_); }
#else
  FlushDenormals() = default;
#endif
  FlushDenormals(const FlushDenormals&) = delete;
  FlushDenormals& operator=(const FlushDenormals&) = delete;

 private:
#if defined(MFPOF_HAVE_MXCSR)
  static constexpr unsigned kFtz = 0x8000;
  static constexpr unsigned kDaz = 0x0040;
  unsigned saved_;
#endif
};

}  // namespace mfpof

#pragma once

#include <cstddef>
#include <functional>

namespace mfpof {

/// Number of worker threads used by parallel_for; 0 means hardware concurrency.
void set_thread_count(unsigned n);
[[nodiscard]] unsigned thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads.
/// Work items must write only to their own slots; the first exception thrown
/// (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace mfpof

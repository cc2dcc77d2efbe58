#pragma once

#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dipe {

/// Thread budget for the OpenMP kernels. `threads <= 0` means one thread per
/// hardware core. Results never depend on this value.
struct ExecConfig {
  int threads = 0;

  int resolved_threads() const noexcept {
    if (threads > 0) return threads;
#ifdef _OPENMP
    return omp_get_num_procs();
#else
    return 1;
#endif
  }
};

/// Runs fn(i) for i in [0, n). Each index must write only its own output
/// slot; callers combine slots afterwards in index order. If several
/// iterations throw, the exception of the lowest index is rethrown so the
/// reported error does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, const ExecConfig& exec, Fn&& fn) {
  std::exception_ptr first_error;
  std::size_t first_index = std::numeric_limits<std::size_t>::max();
  std::mutex guard;
  const int threads = exec.resolved_threads();
  const auto count = static_cast<std::ptrdiff_t>(n);

#pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads > 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(guard);
      if (static_cast<std::size_t>(i) < first_index) {
        first_index = static_cast<std::size_t>(i);
        first_error = std::current_exception();
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace dipe

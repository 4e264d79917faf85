#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <limits>

#ifdef CLUTTER_FORGE_HAVE_OPENMP
#include <omp.h>
#endif

namespace clutter {

/// Every kernel that has an OpenMP version keeps a serial reference; both
/// produce bit-identical results because work items never share
/// accumulators and random streams are split per item, not per thread.
enum class Execution { Serial, Parallel };

/// Worker cap from CLUTTER_FORGE_THREADS (0 when unset or invalid).
int thread_cap_from_env();

/// Applies the environment cap to the OpenMP runtime, if any.
void configure_threads();

/// Runs fn(i) for i in [0, n). With Execution::Parallel the iterations are
/// distributed by OpenMP; an exception thrown by any iteration is rethrown
/// after the loop (the one from the lowest index wins).
template <typename Fn>
void for_each_index(std::size_t n, Execution exec, Fn&& fn) {
  if (exec == Execution::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first;
  std::size_t first_index = std::numeric_limits<std::size_t>::max();
  const auto count = static_cast<long long>(n);
#ifdef CLUTTER_FORGE_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#ifdef CLUTTER_FORGE_HAVE_OPENMP
#pragma omp critical(clutter_for_each_index)
#endif
      {
        if (static_cast<std::size_t>(i) < first_index) {
          first_index = static_cast<std::size_t>(i);
          first = std::current_exception();
        }
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace clutter

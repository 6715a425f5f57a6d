#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qc {

// Resolves a requested thread count: <= 0 means "all available cores".
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Runs fn(i) for i in [0, n). threads <= 1 takes the serial reference loop,
// anything else the OpenMP kernel. Callers must write only to per-index
// slots (no shared accumulation), which makes the result identical for both
// paths and for any thread count; tests and the qc_bench tool compare them.
// A worker exception aborts remaining items and rethrows on the caller.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  threads = resolve_threads(threads);
#ifdef _OPENMP
  if (threads > 1 && n > 1) {
    const auto count = static_cast<std::int64_t>(n);
    std::exception_ptr failure;
    bool failed = false;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t i = 0; i < count; ++i) {
      bool skip;
#pragma omp atomic read
      skip = failed;
      if (skip) continue;
      try {
        fn(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(qc_parallel_for_failure)
        if (!failure) failure = std::current_exception();
#pragma omp atomic write
        failed = true;
      }
    }
    if (failure) std::rethrow_exception(failure);
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) {
    fn(i);
  }
}

}  // namespace qc

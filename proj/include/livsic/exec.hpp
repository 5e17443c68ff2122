#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace livsic {

/// Which implementation of a data-parallel kernel to run. The serial path is
/// the reference; the OpenMP path must reproduce it bit for bit.
enum class Backend { serial, openmp };

struct Exec {
  Backend backend = Backend::openmp;
  int jobs = 0;  // 0: OpenMP default

  static Exec serial() { return {Backend::serial, 1}; }
  static Exec openmp(int jobs = 0) { return {Backend::openmp, jobs}; }
};

/// Process-wide default used by operations that are not handed an Exec.
Exec default_exec();
void set_default_exec(Exec exec);

/// Runs body(i) for i in [0, n). Every index writes only its own output slot,
/// so the result does not depend on the backend or the thread count.
/// The first exception thrown by any index is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t n, const Exec& exec, Body&& body) {
  if (exec.backend == Backend::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const int threads = exec.jobs > 0 ? exec.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace livsic

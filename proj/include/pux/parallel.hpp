#pragma once

#include <exception>

#include "pux/common.hpp"

namespace pux {

// Runs body(i) for i in [0, n). Exceptions are captured and the one from the
// lowest index is rethrown after the loop.
template <class Body>
void parallelFor(long n, Exec exec, Body&& body, int chunk = 16) {
  std::exception_ptr err;
  long errIndex = n;
#pragma omp parallel for schedule(dynamic, chunk) if (exec == Exec::Parallel)
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(pux_parallel_for)
      if (i < errIndex) {
        errIndex = i;
        err = std::current_exception();
      }
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace pux

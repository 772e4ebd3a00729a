#pragma once

#include <exception>
#include <mutex>

namespace pg {

// Batch kernels take a policy; both paths write into preallocated slots, so
// results are identical and ordered regardless of the policy.
enum class ExecPolicy { serial, parallel };

// f(i) for i in [0, n). Under the parallel policy iterations run in an OpenMP
// team; the first exception thrown by any iteration is rethrown afterwards.
template <class F>
void for_each_index(int n, ExecPolicy policy, F&& f) {
  if (policy == ExecPolicy::serial || n < 2) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr first;
  std::mutex m;
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    try {
      f(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(m);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace pg

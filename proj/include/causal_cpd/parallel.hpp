#ifndef CAUSAL_CPD_PARALLEL_HPP
#define CAUSAL_CPD_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ccpd {

/// Worker cap for parallel_for. Defaults to CAUSAL_CPD_THREADS, else the
/// hardware concurrency.
int thread_count();
void set_thread_count(int threads);

namespace detail {
inline thread_local bool in_parallel_worker = false;
}

/// Runs body(i) for i in [0, count). Each index writes only its own output
/// slot, so results are independent of the schedule. Nested calls run
/// inline on the calling worker. The exception of the lowest failing index
/// is rethrown.
template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), count);
  if (workers <= 1 || detail::in_parallel_worker) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        detail::in_parallel_worker = true;
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) break;
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace ccpd

#endif  // CAUSAL_CPD_PARALLEL_HPP

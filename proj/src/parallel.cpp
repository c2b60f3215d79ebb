#include "causal_cpd/parallel.hpp"

#include <cstdlib>
#include <string>

namespace ccpd {

namespace {

int default_threads() {
  if (const char* env = std::getenv("CAUSAL_CPD_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::atomic<int>& thread_setting() {
  static std::atomic<int> threads{default_threads()};
  return threads;
}

}  // namespace

int thread_count() { return thread_setting().load(); }

void set_thread_count(int threads) { thread_setting().store(threads < 1 ? 1 : threads); }

}  // namespace ccpd

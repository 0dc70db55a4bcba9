#include "anovacheb/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

namespace anovacheb {

int resolve_threads(int requested, std::size_t task_count) {
  int t = requested;
  if (t <= 0) {
    if (const char* env = std::getenv("ANOVACHEB_THREADS")) {
      t = std::atoi(env);
    }
    if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
    if (t <= 0) t = 1;
  }
  if (task_count < static_cast<std::size_t>(t))
    t = static_cast<int>(task_count ? task_count : 1);
  return t;
}

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const int t = resolve_threads(threads, n);
  if (t == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  // Dynamic work stealing via a shared counter: the assignment of task to
  // thread varies, but tasks only write caller-owned per-task slots, so
  // outputs stay deterministic.
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(t - 1);
  for (int i = 0; i < t - 1; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace anovacheb

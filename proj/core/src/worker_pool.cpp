#include "dflrb/harness/worker_pool.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "dflrb/errors.hpp"

namespace dflrb::harness {

int resolve_threads(int requested) {
  if (requested < 0) throw ConfigError("threads must be >= 0");
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DFLRB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw ConfigError("DFLRB_THREADS must be a positive integer");
    return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void run_parallel(int task_count, int threads,
                  const std::function<void(int)>& task) {
  if (task_count <= 0) return;
  threads = std::min(resolve_threads(threads), task_count);

  std::atomic<int> next{0};
  std::mutex mu;
  int first_failed = task_count;
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= task_count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < first_failed) {
          first_failed = i;
          first_error = std::current_exception();
        }
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace dflrb::harness

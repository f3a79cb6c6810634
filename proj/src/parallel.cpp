#include "atlas/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace atlas {

namespace {

std::atomic<std::size_t>& worker_setting() {
  static std::atomic<std::size_t> n{
      std::max<std::size_t>(1, std::thread::hardware_concurrency())};
  return n;
}

}  // namespace

// Nested loops run inline on the calling worker.
static thread_local bool in_parallel_region = false;

std::size_t worker_count() { return worker_setting().load(); }

void set_worker_count(std::size_t n) {
  worker_setting().store(std::max<std::size_t>(1, n));
}

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1 || in_parallel_region) {
    body(0, n);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::jthread> threads;
  threads.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      in_parallel_region = true;
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  threads.clear();  // joins
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace atlas

#ifndef INCLUDE_GIBBSDP_PARALLEL_HPP
#define INCLUDE_GIBBSDP_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gibbsdp {

/// Calls f(i) for i in [0, n) on up to `threads` workers. Work items must
/// write only to their own slot; the first exception is rethrown.
template<typename F>
void parallel_for(std::size_t n, int threads, F&& f) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if(workers <= 1) {
    for(std::size_t i = 0; i < n; ++i) {
      f(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for(std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for(std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch(...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if(!error) {
            error = std::current_exception();
          }
          next = n;
        }
      }
    });
  }
  for(auto& t: pool) {
    t.join();
  }
  if(error) {
    std::rethrow_exception(error);
  }
}

}  // namespace gibbsdp

#endif  // INCLUDE_GIBBSDP_PARALLEL_HPP

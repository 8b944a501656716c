#ifndef SOLGEO_PARALLEL_HPP
#define SOLGEO_PARALLEL_HPP

// Deterministic parallel map: item i is always computed by fn(i) and stored
// in slot i, so results do not depend on the number of workers.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "solgeo/types.hpp"

namespace solgeo {

/// Worker count from SOLGEO_WORKERS, else the hardware concurrency.
inline unsigned default_workers() {
  if (const char* env = std::getenv("SOLGEO_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw DomainError("SOLGEO_WORKERS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

template <class Fn>
auto parallel_map(std::size_t n, unsigned workers, Fn&& fn) {
  using T = decltype(fn(std::size_t{0}));
  std::vector<T> out(n);
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    const unsigned used = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    for (unsigned w = 0; w < used; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            out[i] = fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace solgeo

#endif  // SOLGEO_PARALLEL_HPP

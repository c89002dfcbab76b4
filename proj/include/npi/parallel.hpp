#pragma once

#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace npi {

// Worker count: NPI_THREADS if set, otherwise the hardware concurrency.
inline unsigned thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NPI_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(std::min<long>(v, 256));
  }
  return hw;
}

// Calls f(i) for i in [0, count) on contiguous static chunks. Results must be
// written to per-index slots so output never depends on the schedule.
template <class F>
void parallel_for(size_t count, F&& f) {
  unsigned T = std::min<size_t>(thread_count(), std::max<size_t>(count, 1));
  if (T <= 1) {
    for (size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(T);
  size_t chunk = (count + T - 1) / T;
  for (unsigned t = 0; t < T; ++t) {
    pool.emplace_back([&, t] {
      try {
        size_t lo = t * chunk, hi = std::min(count, lo + chunk);
        for (size_t i = lo; i < hi; ++i) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace npi

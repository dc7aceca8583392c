#ifndef SERI_REPLICAS_HPP
#define SERI_REPLICAS_HPP

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "seri/rng.hpp"

namespace seri {

/// Worker count: SERI_THREADS if set to a positive integer, else the hardware
/// concurrency (at least 1).
inline unsigned worker_count() {
  if (const char* env = std::getenv("SERI_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(r, rng_r) for r in [0, count) with rng_r = CounterRng(stream_seed(master, r)).
/// Results are stored by replica index, so the output does not depend on the
/// number of workers. The first exception thrown by any replica is rethrown.
template <class T, class Fn>
std::vector<T> run_replicas(std::uint64_t count, std::uint64_t master_seed, Fn&& fn) {
  std::vector<T> out(count);
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(worker_count(), std::max<std::uint64_t>(count, 1)));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](unsigned w) {
    try {
      for (std::uint64_t r = w; r < count; r += workers) {
        CounterRng rng(stream_seed(master_seed, r));
        out[r] = fn(r, rng);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace seri

#endif  // SERI_REPLICAS_HPP

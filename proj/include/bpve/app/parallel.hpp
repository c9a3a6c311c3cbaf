#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "bpve/random.hpp"

namespace bpve::app {

/// Runs fn(i, rng_i) for i in [0, count) with rng_i = substream(seed, i) and
/// returns the results in index order, so the outcome does not depend on
/// the number of threads. The first exception thrown by any worker is
/// rethrown.
template <class Fn>
auto replicate(std::uint64_t seed, std::size_t count, unsigned threads, Fn fn) {
  using T = decltype(fn(std::size_t{}, std::declval<Rng&>()));
  std::vector<T> out(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        Rng rng = substream(seed, i);
        out[i] = fn(i, rng);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace bpve::app

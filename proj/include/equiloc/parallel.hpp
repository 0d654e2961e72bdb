#pragma once

// Deterministic data-parallel helpers.
//
// Work is cut into fixed-size blocks independent of the thread count; block
// partial results are combined by a fixed pairwise tree, so reductions are
// bit-reproducible for any number of threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <complex>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace equiloc {

namespace detail {
inline std::atomic<int>& thread_setting() {
  static std::atomic<int> n{0};
  return n;
}
}  // namespace detail

/// Thread count from EQUILOC_THREADS, else hardware concurrency capped at 8.
inline int default_thread_count() {
  if (const char* env = std::getenv("EQUILOC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw == 0 ? 1u : hw, 1u, 8u));
}

inline int thread_count() {
  const int n = detail::thread_setting().load();
  return n > 0 ? n : default_thread_count();
}

inline void set_thread_count(int n) { detail::thread_setting().store(std::max(n, 0)); }

inline constexpr std::size_t kBlockSize = 256;

/// Calls body(block_begin, block_end, block_index) for every block, in parallel.
template <class Body>
void parallel_blocks(std::size_t n, Body&& body) {
  const std::size_t nblocks = (n + kBlockSize - 1) / kBlockSize;
  const auto threads = static_cast<std::size_t>(std::min<std::size_t>(thread_count(), std::max<std::size_t>(nblocks, 1)));
  if (threads <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b) body(b * kBlockSize, std::min(n, (b + 1) * kBlockSize), b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t b = next.fetch_add(1);
        if (b >= nblocks) return;
        try {
          body(b * kBlockSize, std::min(n, (b + 1) * kBlockSize), b);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(nblocks);
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Pairwise (tree) sum in fixed order.
template <class T>
T pairwise_sum(std::vector<T> v) {
  if (v.empty()) return T{};
  while (v.size() > 1) {
    std::vector<T> next((v.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < v.size(); i += 2) next[i / 2] = v[i] + v[i + 1];
    if (v.size() % 2) next.back() = v.back();
    v.swap(next);
  }
  return v.front();
}

/// Deterministic parallel sum of term(i) for i in [0, n).
template <class T, class Term>
T parallel_sum(std::size_t n, Term&& term) {
  const std::size_t nblocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<T> partial(nblocks);
  parallel_blocks(n, [&](std::size_t lo, std::size_t hi, std::size_t b) {
    std::vector<T> local;
    local.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) local.push_back(term(i));
    partial[b] = pairwise_sum(std::move(local));
  });
  return pairwise_sum(std::move(partial));
}

/// max() that propagates NaN.
inline double nan_max(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::quiet_NaN();
  return std::max(a, b);
}

/// Parallel maximum of value(i) for i in [0, n); 0 for an empty range.
template <class Value>
double parallel_max(std::size_t n, Value&& value) {
  const std::size_t nblocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<double> partial(nblocks, 0.0);
  parallel_blocks(n, [&](std::size_t lo, std::size_t hi, std::size_t b) {
    double m = 0.0;
    for (std::size_t i = lo; i < hi; ++i) m = nan_max(m, value(i));
    partial[b] = m;
  });
  double m = 0.0;
  for (double v : partial) m = nan_max(m, v);
  return m;
}

}  // namespace equiloc

#pragma once

#include "rdlab/core.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rdlab {

/// Worker count: RD_LAB_THREADS if set (must be a positive integer),
/// otherwise the hardware concurrency.
inline std::size_t worker_count() {
  if (const char* env = std::getenv("RD_LAB_THREADS"); env != nullptr) {
    std::int64_t n = 0;
    try {
      n = detail::parse_int(env, "RD_LAB_THREADS");
    } catch (const ParseError&) {
      throw PreconditionFailed("RD_LAB_THREADS must be a positive integer, got '" + std::string(env) + "'");
    }
    if (n < 1) throw PreconditionFailed("RD_LAB_THREADS must be a positive integer, got '" + std::string(env) + "'");
    return static_cast<std::size_t>(n);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs body(worker, begin, end) over contiguous chunks of [0, n). Chunk
/// boundaries depend only on n and the worker count, never on timing.
template <class Body>
void parallel_chunks(std::size_t n, Body&& body) {
  auto workers = std::min(worker_count(), std::max<std::size_t>(1, n));
  if (workers <= 1) {
    body(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> threads;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    auto begin = n * w / workers;
    auto end = n * (w + 1) / workers;
    threads.emplace_back([&, w, begin, end] {
      try {
        body(w, begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Evaluates fn(i) for i in [0, n) in parallel; results in index order.
template <class Fn>
auto parallel_map(std::size_t n, Fn&& fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> results(n);
  parallel_chunks(n, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (auto i = begin; i < end; ++i) results[i] = fn(i);
  });
  return results;
}

}  // namespace rdlab

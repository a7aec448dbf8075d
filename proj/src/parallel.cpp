// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "olat/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace olat {

namespace {

std::atomic<int> g_thread_override{0};

int env_thread_count() {
  if (const char* env = std::getenv("OLAT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

int default_thread_count() {
  const int override = g_thread_override.load(std::memory_order_relaxed);
  return override > 0 ? override : env_thread_count();
}

void set_default_thread_count(int threads) {
  g_thread_override.store(threads > 0 ? threads : 0,
                          std::memory_order_relaxed);
}

void parallel_for(int begin, int end, const std::function<void(int)>& fn,
                  int threads) {
  const int range = end - begin;
  if (range <= 0) return;
  if (threads <= 0) threads = default_thread_count();
  threads = std::min(threads, range);

  if (threads == 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }

  // Static contiguous chunks; chunk t covers [begin + t*chunk, ...).
  const int chunk = (range + threads - 1) / threads;
  std::vector<std::thread> workers;
  workers.reserve(threads - 1);
  auto run_chunk = [&](int t) {
    const int lo = begin + t * chunk;
    const int hi = std::min(end, lo + chunk);
    for (int i = lo; i < hi; ++i) fn(i);
  };
  for (int t = 1; t < threads; ++t) workers.emplace_back(run_chunk, t);
  run_chunk(0);
  for (auto& w : workers) w.join();
}

}  // namespace olat

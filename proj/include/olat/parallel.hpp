// Copyright 2026 The olatkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

namespace olat {

/// Default worker count: OLAT_THREADS if set, otherwise the hardware
/// concurrency. Always at least 1.
int default_thread_count();

/// Overrides the process-wide default (0 restores the environment default).
void set_default_thread_count(int threads);

/// Runs fn(i) for every i in [begin, end) across a static partition of
/// contiguous chunks. Each index is visited exactly once, so any computation
/// that writes to disjoint locations per index produces byte-identical
/// results for every thread count.
void parallel_for(int begin, int end, const std::function<void(int)>& fn,
                  int threads = 0);

}  // namespace olat

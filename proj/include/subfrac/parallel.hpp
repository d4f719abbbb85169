#pragma once

#include <cstddef>
#include <functional>

namespace subfrac {

// Worker cap: SUBFRAC_THREADS when set (clamped to >= 1), hardware
// concurrency otherwise. Read on every call so tests can toggle it.
std::size_t workerCount();

// Runs body(chunk) for chunk in [0, chunks). Scheduling is dynamic, but each
// chunk must compute the same result regardless of which thread runs it;
// callers reduce per-chunk outputs in chunk order so results do not depend on
// the worker count. Exceptions from workers are rethrown on the caller.
void forEachChunk(std::size_t chunks, const std::function<void(std::size_t)>& body);

}  // namespace subfrac

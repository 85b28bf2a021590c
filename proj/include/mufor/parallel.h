#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mufor {

// Resolves a requested worker count: 0 means MUFOR_WORKERS from the
// environment, falling back to the hardware concurrency.
std::size_t resolve_workers(std::size_t requested);

// Calls fn(i) for i in [0, count) on up to `workers` threads. Work items are
// independent, so results must be written to per-item slots. The first
// exception thrown by any item is rethrown after all threads join.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace mufor

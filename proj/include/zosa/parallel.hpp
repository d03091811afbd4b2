#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace zosa {

// Number of workers used when a caller passes 0.
std::size_t default_workers() noexcept;

// Calls fn(i) for every i in [0, n) on up to `workers` threads. Work items
// must write only to their own output slot; callers reduce afterwards in
// index order, which keeps results independent of the schedule. If any item
// throws, the exception of the lowest failing index is rethrown after all
// workers have joined.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace zosa

#pragma once

#include <cstddef>
#include <functional>

namespace hdclt {

/// Worker count used by parallel_for. Defaults to HDCLT_THREADS when set,
/// otherwise to the hardware concurrency.
[[nodiscard]] std::size_t thread_count() noexcept;
void set_thread_count(std::size_t threads) noexcept;

/**
 * Runs body(i) for every i in [0, count) on the worker pool.
 *
 * The body must only write to state owned by index i. The first exception
 * thrown by any task is rethrown after all workers have joined.
 */
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace hdclt

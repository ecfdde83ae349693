#include "hdclt/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace hdclt {
namespace {

std::size_t initial_thread_count() noexcept {
    if (const char* env = std::getenv("HDCLT_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (...) {
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

thread_local bool inside_pool = false;

std::atomic<std::size_t>& threads_setting() {
    static std::atomic<std::size_t> value{initial_thread_count()};
    return value;
}

}  // namespace

std::size_t thread_count() noexcept { return threads_setting().load(); }

void set_thread_count(std::size_t threads) noexcept { threads_setting().store(std::max<std::size_t>(1, threads)); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    // Nested calls run inline on the calling worker.
    const std::size_t workers = inside_pool ? 1 : std::min(thread_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        const bool was_inside = inside_pool;
        inside_pool = true;
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
        inside_pool = was_inside;
    };

    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace hdclt

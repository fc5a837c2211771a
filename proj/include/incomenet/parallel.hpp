#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace incomenet {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items are
// handed out in fixed-size blocks through an atomic cursor; callers must
// write results into per-index slots so the outcome is independent of the
// thread count. The first exception thrown by any worker is rethrown.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& fn) {
    if (n == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    constexpr std::size_t block = 64;
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t start = cursor.fetch_add(block, std::memory_order_relaxed);
            if (start >= n) return;
            const std::size_t end = std::min(start + block, n);
            try {
                for (std::size_t i = start; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace incomenet

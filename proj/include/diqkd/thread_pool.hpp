#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace diqkd {

// Runs fn(i) for i in [0, count) on up to n_threads workers. Results must be
// written to preallocated slots indexed by i, so the outcome is independent
// of scheduling order.
inline void parallel_for(size_t count, int n_threads, const std::function<void(size_t)>& fn) {
    if (n_threads <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const size_t workers = std::min<size_t>(static_cast<size_t>(n_threads), count);
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace diqkd

#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace spinsim {

// Runs fn(i) for i in [0, n) over `threads` workers. Each index writes its own
// output slot, so results are identical to serial execution.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> counter{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = counter.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    int nw = std::min<std::size_t>(threads, n);
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace spinsim

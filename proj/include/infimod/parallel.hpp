#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace infimod {

/// Static block partition of [0, n) over `threads` workers (0 = hardware
/// concurrency). Work items must write to disjoint slots; results are
/// bitwise identical to the serial loop.
inline void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    if (threads == 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 1 || n < 4 * threads) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        int lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (int i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace infimod

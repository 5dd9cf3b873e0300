#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace jigclu {

/// Worker count for compute parallelism (JIGCLU_THREADS overrides the
/// hardware count). Results stay bit-deterministic for any thread count:
/// callers only parallelize over disjoint outputs or fixed-order chunk
/// reductions.
inline int compute_threads() {
    static const int n = [] {
        if (const char* env = std::getenv("JIGCLU_THREADS"); env && *env) {
            int v = std::atoi(env);
            if (v >= 1) return v;
        }
        unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : int(hw);
    }();
    return n;
}

/// Runs fn(begin, end) over [0, n) split into contiguous ranges, one per
/// worker. fn must only write locations owned by its range.
template <class Fn>
void parallel_for(int64_t n, Fn&& fn) {
    const int workers = std::min<int64_t>(compute_threads(), n);
    if (workers <= 1) {
        if (n > 0) fn(int64_t(0), n);
        return;
    }
    std::vector<std::thread> threads;
    const int64_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int64_t begin = w * chunk;
        const int64_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : threads) t.join();
}

} // namespace jigclu

#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace hardy::detail {

/// Runs fn(begin, end) over disjoint chunks of [0, n), possibly on several
/// threads. Callers must keep per-index outputs independent so the result is
/// schedule-free.
inline void parallelChunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(hw, std::max<std::size_t>(1, n / 256));
    if (workers <= 1 || n < 512) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t b = w * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&, b, e] { fn(b, e); });
    }
    for (auto& t : pool) t.join();
}

/// Order-fixed pairwise sum; identical result for any thread schedule above.
inline double pairwiseSum(std::span<const double> x) {
    if (x.size() <= 8) {
        double s = 0;
        for (double xi : x) s += xi;
        return s;
    }
    const std::size_t half = x.size() / 2;
    return pairwiseSum(x.first(half)) + pairwiseSum(x.subspan(half));
}

} // namespace hardy::detail

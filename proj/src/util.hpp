#pragma once

#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace skelink {

// Exit-code contract: 2 input, 3 mathematical hypothesis, 4 internal.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct HypothesisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline int thread_count() {
    if (const char* env = std::getenv("SKELINK_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? (int)hc : 1;
}

// Static block partition; results must be written to disjoint slots so the
// outcome is independent of scheduling.
inline void parallel_for(int64_t begin, int64_t end, const std::function<void(int64_t)>& fn) {
    int64_t n = end - begin;
    if (n <= 0) return;
    int nt = std::min<int64_t>(thread_count(), n);
    if (nt <= 1) {
        for (int64_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    int64_t chunk = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        int64_t lo = begin + t * chunk;
        int64_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn]() {
            for (int64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace skelink

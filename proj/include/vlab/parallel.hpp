#pragma once

#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace vlab {

/// Parallelism cap: VIRIAL_LAB_THREADS when set, hardware concurrency
/// otherwise (at least 1).
inline int max_threads() {
    if (const char* env = std::getenv("VIRIAL_LAB_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run fn(0..n-1) on up to max_threads() workers. Results must be written to
/// per-index slots; the first exception is rethrown after all workers join.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
    const int workers = std::min(n, max_threads());
    if (workers <= 1) {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&, t] {
            try {
                for (int i = t; i < n; i += workers)
                    fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool)
        th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace vlab

#pragma once

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace radpl {

/// Worker cap: NEHARI_THREADS if set and positive, else hardware concurrency.
inline unsigned thread_budget() {
    if (const char* env = std::getenv("NEHARI_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/**
 * Run fn(i) for i in [0, n) on up to thread_budget() threads. Results must
 * be written to per-index slots by the caller; the schedule never affects
 * them. Exceptions propagate from the first failing index.
 */
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const unsigned workers = std::min<std::size_t>(thread_budget(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < n; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
}

}  // namespace radpl

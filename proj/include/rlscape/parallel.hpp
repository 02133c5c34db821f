#pragma once

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rlscape {

// Worker count for a parallel region: hardware concurrency, capped by the
// job count and by RLSCAPE_THREADS when set. RLSCAPE_THREADS=1 forces
// serial execution.
inline unsigned worker_count(std::size_t jobs) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 4;
    if (const char* env = std::getenv("RLSCAPE_THREADS")) {
        const long req = std::strtol(env, nullptr, 10);
        if (req >= 1) hw = static_cast<unsigned>(req);
    }
    if (hw > 32) hw = 32;
    if (static_cast<std::size_t>(hw) > jobs) hw = static_cast<unsigned>(jobs);
    return hw == 0 ? 1 : hw;
}

// Runs body(i) for i in [0, n). Scheduling is dynamic, so callers must make
// body(i) independent of execution order: each job derives its own RNG
// stream by index and writes only to slot i of preallocated output. Under
// that discipline results are identical for any thread count.
//
// The first exception thrown by any job is rethrown on the calling thread
// after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& body) {
    if (n == 0) return;
    const unsigned workers = worker_count(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace rlscape

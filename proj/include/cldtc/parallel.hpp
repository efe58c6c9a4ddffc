#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace cldtc {

/// Environment variable that overrides the worker-pool size.
inline constexpr const char* kThreadsEnv = "CLDTC_THREADS";

/// 0 means: $CLDTC_THREADS if set, else the hardware concurrency.
inline std::size_t resolve_threads(std::size_t requested)
{
    if (requested > 0) return requested;
    if (const char* env = std::getenv(kThreadsEnv)) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, count) on a bounded pool. Work is claimed in
/// index order; results must be written to per-index slots by the caller.
/// Returns one exception_ptr per index (null on success).
template <class Fn>
std::vector<std::exception_ptr> parallel_for(std::size_t count, std::size_t threads, Fn&& fn)
{
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n_workers = std::min(resolve_threads(threads), std::max<std::size_t>(count, 1));
    if (n_workers <= 1) {
        worker();
        return errors;
    }
    {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (std::size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    }
    return errors;
}

}  // namespace cldtc

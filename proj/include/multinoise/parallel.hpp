// parallel.hpp: ordered parallel map over an index range
//
// Results are stored by index, so any reduction performed afterwards in index
// order is bit-identical to the serial one regardless of the thread count.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace multinoise {

// MULTINOISE_THREADS caps the worker count; unset or invalid means
// hardware_concurrency.
inline unsigned thread_count()
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MULTINOISE_THREADS")) {
        try {
            long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(std::min<long>(v, 1024));
        } catch (...) {
        }
    }
    return hw;
}

template <class F>
auto parallel_map(std::size_t count, F&& fn) -> std::vector<std::invoke_result_t<F&, std::size_t>>
{
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<std::optional<R>> slots(count);
    unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), count));

    std::exception_ptr first_error;
    std::size_t first_error_index = count;
    std::mutex error_mutex;

    auto run_one = [&](std::size_t i) {
        try {
            slots[i].emplace(fn(i));
        } catch (...) {
            std::lock_guard lock(error_mutex);
            // lowest failing index wins so the reported error is deterministic
            if (i < first_error_index) {
                first_error_index = i;
                first_error = std::current_exception();
            }
        }
    };

    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) run_one(i);
            });
        }
    }

    if (first_error) std::rethrow_exception(first_error);
    std::vector<R> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

} // namespace multinoise

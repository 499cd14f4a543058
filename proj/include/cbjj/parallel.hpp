#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace cbjj {

struct RunOptions {
    unsigned threads = 0;                         // 0: hardware concurrency
    const std::atomic<bool>* cancel = nullptr;    // polled between work items

    unsigned resolved_threads() const
    {
        if (threads > 0)
            return threads;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : hw;
    }
    bool cancelled() const { return cancel != nullptr && cancel->load(std::memory_order_relaxed); }
};

/// Runs body(i) for i in [0, n) on a pool of workers pulling indices from a
/// shared counter. Work items must write only to their own slot. Returns
/// false if cancelled before all items ran.
inline bool parallel_for(std::size_t n, const RunOptions& options, const std::function<void(std::size_t)>& body)
{
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stopped{false};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto worker = [&] {
        for (;;) {
            if (options.cancelled()) {
                stopped = true;
                return;
            }
            if (failed.load(std::memory_order_relaxed))
                return;
            const std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try {
                body(i);
            } catch (...) {
                if (!failed.exchange(true))
                    failure = std::current_exception();
                return;
            }
        }
    };

    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(options.resolved_threads(), n));
    if (count <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(count);
        for (unsigned t = 0; t < count; ++t)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);
    return !stopped.load();
}

}  // namespace cbjj

#ifndef MEMAP_PARALLEL_HPP
#define MEMAP_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace memap {

    /// Runs f(i) for i in [0, n) on up to `threads` threads using contiguous
    /// chunks. f must only write to per-index outputs.
    template <typename F>
    void parallel_for(std::size_t n, int threads, F&& f)
    {
        const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), n);
        if (workers <= 1) {
            for (std::size_t i = 0; i < n; ++i)
                f(i);
            return;
        }
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end)
                break;
            pool.emplace_back([&, begin, end] {
                try {
                    for (std::size_t i = begin; i < end; ++i)
                        f(i);
                }
                catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            });
        }
        pool.clear();
        if (error)
            std::rethrow_exception(error);
    }

} // namespace memap

#endif

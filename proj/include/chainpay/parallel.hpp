#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace chainpay {

/// Runs fn(i) for i in [0, count) across up to `threads` workers on
/// contiguous index blocks. Callers store results by index, so the outcome
/// never depends on the thread count. The first exception thrown by any
/// worker is rethrown on the calling thread.
template <typename Fn>
void parallel_for(size_t count, int threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    size_t workers = std::min<size_t>(static_cast<size_t>(threads), count);
    size_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (size_t w = 0; w < workers; ++w) {
        size_t begin = w * chunk;
        size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, &failure, &failure_mutex, begin, end] {
            try {
                for (size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (std::thread& worker : pool) worker.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace chainpay

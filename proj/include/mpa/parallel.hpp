#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mpa {

// Static block partition over [0, count). Each index is processed exactly
// once; results must be written to per-index slots so the schedule cannot
// affect output bytes.
inline void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    threads = std::min(threads, count);
    std::vector<std::thread> pool;
    std::mutex err_mutex;
    std::exception_ptr error;
    const int chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int begin = t * chunk;
        const int end = std::min(count, begin + chunk);
        pool.emplace_back([&, begin, end] {
            try {
                for (int i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace mpa

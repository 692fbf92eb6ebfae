#include "hypstrip/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hypstrip {

namespace {
std::atomic<int> g_workers{0};
}

void set_max_workers(int n) { g_workers = std::max(0, n); }

int max_workers() {
    const int n = g_workers.load();
    if (n > 0) return n;
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int begin, int end, const std::function<void(int)>& body, int grain) {
    const int count = end - begin;
    if (count <= 0) return;
    const int workers = std::min(max_workers(), (count + std::max(grain, 1) - 1) / std::max(grain, 1));
    if (workers == 1) {
        for (int i = begin; i < end; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        const int lo = begin + static_cast<int>(static_cast<long long>(count) * w / workers);
        const int hi = begin + static_cast<int>(static_cast<long long>(count) * (w + 1) / workers);
        pool.emplace_back([&, lo, hi] {
            try {
                for (int i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace hypstrip

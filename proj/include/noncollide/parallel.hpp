#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace noncollide {

// Runs fn(0..n-1) on up to `workers` threads. Each index writes only its
// own output slot and any reduction happens afterwards in index order, so
// results do not depend on the worker count or schedule.
template <typename Fn>
void parallel_for(int n, int workers, Fn&& fn) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    const int nthreads = std::min(workers, n);
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

int default_workers();

}  // namespace noncollide

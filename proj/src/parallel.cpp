// SPDX-License-Identifier: Apache-2.0

#include "spectra/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace spectra {

int worker_count()
{
    static const int workers = [] {
        unsigned hw = std::thread::hardware_concurrency();
        if (hw == 0)
            hw = 1;
        if (const char* env = std::getenv("SPECTRA_THREADS")) {
            long cap = std::strtol(env, nullptr, 10);
            if (cap >= 1 && static_cast<unsigned>(cap) < hw)
                hw = static_cast<unsigned>(cap);
            if (cap == 0 || cap == 1)
                hw = 1;
        }
        return static_cast<int>(hw);
    }();
    return workers;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn)
{
    const int workers = worker_count();
    // Threading only pays off for batches of nontrivial work items.
    if (workers <= 1 || n < 16) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int spawned = std::min<std::size_t>(workers, n) - 1;
    pool.reserve(spawned);
    for (int t = 0; t < spawned; ++t)
        pool.emplace_back(body);
    body();
    for (auto& th : pool)
        th.join();
}

} // namespace spectra

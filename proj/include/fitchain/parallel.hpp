#pragma once

#include <algorithm>
#include <barrier>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace fitchain {

/// Worker count: explicit request, else FITCHAIN_THREADS, else hardware concurrency.
inline unsigned resolve_threads(unsigned requested = 0)
{
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FITCHAIN_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `rounds` synchronized rounds over `items` work units split in contiguous blocks.
/// `work(item, round)` runs in parallel; `after(round)` runs once per round after all work
/// for that round has finished and before the next round starts.
inline void run_rounds(std::size_t items, std::size_t rounds, unsigned threads,
                       const std::function<void(std::size_t, std::size_t)>& work,
                       const std::function<void(std::size_t)>& after)
{
    threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(items, 1)));
    if (threads == 1) {
        for (std::size_t r = 0; r < rounds; ++r) {
            for (std::size_t i = 0; i < items; ++i) work(i, r);
            after(r);
        }
        return;
    }

    std::size_t round = 0;
    std::barrier sync(static_cast<std::ptrdiff_t>(threads), [&]() noexcept {
        after(round);
        ++round;
    });
    auto worker = [&](unsigned t) {
        const std::size_t begin = items * t / threads;
        const std::size_t end = items * (t + 1) / threads;
        for (std::size_t r = 0; r < rounds; ++r) {
            for (std::size_t i = begin; i < end; ++i) work(i, r);
            sync.arrive_and_wait();
        }
    };
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker, t);
    worker(0);
}

} // namespace fitchain

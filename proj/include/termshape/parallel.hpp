#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace termshape::parallel {

// Worker cap from TERMSHAPE_THREADS; affects speed only, never results.
inline int worker_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("TERMSHAPE_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1 && cap < n) n = cap;
    }
    return n;
}

// Deterministic block map-reduce: items are split into fixed-size blocks,
// each block produces a partial on whichever worker picks it up, and the
// partials are combined in block-index order. The block size is part of
// the contract -- identical inputs give bit-identical results for any
// worker count.
template <class Partial, class BlockFn, class CombineFn>
Partial block_reduce(std::int64_t n_items, std::int64_t block_size, const Partial& init,
                     BlockFn block_fn, CombineFn combine) {
    const std::int64_t n_blocks = (n_items + block_size - 1) / block_size;
    std::vector<Partial> partials(static_cast<std::size_t>(n_blocks), init);

    const int workers = std::min<std::int64_t>(worker_count(), n_blocks) > 0
                            ? static_cast<int>(std::min<std::int64_t>(worker_count(), n_blocks))
                            : 1;
    std::atomic<std::int64_t> next{0};
    auto run = [&] {
        for (;;) {
            const std::int64_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            const std::int64_t lo = b * block_size;
            const std::int64_t hi = std::min(lo + block_size, n_items);
            partials[static_cast<std::size_t>(b)] = block_fn(lo, hi);
        }
    };
    if (workers <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& th : pool) th.join();
    }

    Partial acc = init;
    for (std::int64_t b = 0; b < n_blocks; ++b)
        acc = combine(acc, partials[static_cast<std::size_t>(b)]);
    return acc;
}

}  // namespace termshape::parallel

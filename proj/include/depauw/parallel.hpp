#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace depauw {

// Chunked parallel loop. The chunk decomposition is fixed (independent of the
// worker count), so any per-chunk accumulation merged in chunk order is
// deterministic regardless of scheduling.
inline void parallel_chunks(size_t n_items, int workers,
                            const std::function<void(size_t chunk, size_t begin, size_t end)>& fn,
                            size_t n_chunks = 0)
{
    if (n_items == 0) return;
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
    if (n_chunks == 0) n_chunks = 256;
    if (n_chunks > n_items) n_chunks = n_items;

    if (workers == 1) {
        for (size_t c = 0; c < n_chunks; ++c) {
            size_t begin = c * n_items / n_chunks;
            size_t end = (c + 1) * n_items / n_chunks;
            fn(c, begin, end);
        }
        return;
    }

    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                size_t c = next.fetch_add(1);
                if (c >= n_chunks) return;
                size_t begin = c * n_items / n_chunks;
                size_t end = (c + 1) * n_items / n_chunks;
                fn(c, begin, end);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace depauw

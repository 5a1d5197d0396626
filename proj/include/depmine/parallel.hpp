#pragma once

// Deterministic intra-stage parallelism. Work is cut into shards whose
// boundaries depend only on the input size, never on the thread count, and
// shard results are combined in shard order. Running with 1, 2 or 8 threads
// therefore produces identical bytes.

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace depmine {

inline unsigned effective_threads(unsigned requested) {
    return requested == 0 ? 1u : requested;
}

// Calls fn(shard_index, begin, end) for fixed-size shards of [0, n).
// fn must only write to state owned by its shard.
template <class Fn>
void parallel_shards(size_t n, size_t shard_size, unsigned threads, Fn&& fn) {
    if (n == 0) return;
    if (shard_size == 0) shard_size = 1;
    const size_t n_shards = (n + shard_size - 1) / shard_size;
    threads = effective_threads(threads);
    if (threads == 1 || n_shards == 1) {
        for (size_t s = 0; s < n_shards; ++s)
            fn(s, s * shard_size, std::min(n, (s + 1) * shard_size));
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            size_t s = next.fetch_add(1);
            if (s >= n_shards || failed.load()) return;
            try {
                fn(s, s * shard_size, std::min(n, (s + 1) * shard_size));
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// Element-wise map into caller-owned slots: fn(i) for i in [0, n).
template <class Fn>
void parallel_for(size_t n, unsigned threads, Fn&& fn) {
    parallel_shards(n, 64, threads, [&](size_t, size_t b, size_t e) {
        for (size_t i = b; i < e; ++i) fn(i);
    });
}

}  // namespace depmine

#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace coha {

// Number of worker threads used by the counting loops.  Settable from the
// CLI; defaults to the hardware count.
unsigned thread_count();
void set_thread_count(unsigned n);

// Deterministic map-reduce over [0, count): the range is split into a fixed
// number of chunks, each chunk is summed sequentially, and the chunk sums
// are combined in chunk order.  Integer sums are associative, so the result
// is bit-identical to the sequential run for any thread count.
template <class Sum, class Fn>
Sum chunked_sum(std::uint64_t count, Fn&& per_index) {
    constexpr std::uint64_t kChunks = 64;
    const std::uint64_t chunks = count < kChunks ? (count ? count : 1) : kChunks;
    std::vector<Sum> partial(chunks, Sum(0));

    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::uint64_t c = next.fetch_add(1);
            if (c >= chunks) return;
            std::uint64_t lo = count * c / chunks, hi = count * (c + 1) / chunks;
            Sum local(0);
            for (std::uint64_t i = lo; i < hi; ++i) local += per_index(i);
            partial[c] = local;
        }
    };

    unsigned nthreads = thread_count();
    if (nthreads <= 1 || count < 1024) {
        worker();
        while (next.load() < chunks) worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    Sum total(0);
    for (const Sum& s : partial) total += s;
    return total;
}

}  // namespace coha

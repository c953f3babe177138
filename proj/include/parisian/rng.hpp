#pragma once

#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace parisian {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// One generator per replication, keyed by (seed, rep).  Every estimator draws
// replication r from rep_rng(seed, r) only, so results do not depend on how
// replications are divided among threads.
inline std::mt19937_64 rep_rng(std::uint64_t seed, std::uint64_t rep) {
    return std::mt19937_64(splitmix64(splitmix64(seed) + rep));
}

// Static block partition of [0, n) over `threads` workers.  fn(begin, end) must
// write only to disjoint per-index slots; determinism then follows from keyed
// streams, not from scheduling.
template <typename Fn>
void parallel_blocks(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        fn(std::size_t{0}, n);
        return;
    }
    if (threads > n) threads = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t b = std::min(n, static_cast<std::size_t>(w) * chunk);
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& t : pool) t.join();
}

inline unsigned default_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n ? n : 1;
}

}  // namespace parisian

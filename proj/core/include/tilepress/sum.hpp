#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace tilepress {

/// Pairwise (tree) summation. Deterministic for a fixed element order and
/// accurate to O(log n) rounding for sums with up to ~1e7 terms.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 32) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& xs) {
    return pairwise_sum(std::span<const double>(xs));
}

/// Runs `job(first, last)` over `count` partitions using up to `threads`
/// workers. Partition boundaries depend only on `count`, and each job writes
/// its own slot, so results are identical for every thread count.
inline void parallel_partitions(int count, int threads, const std::function<void(int)>& job) {
    if (threads <= 1 || count <= 1) {
        for (int p = 0; p < count; ++p) job(p);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int p = next.fetch_add(1);
            if (p >= count) return;
            job(p);
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min(threads, count);
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

/// Deterministic uniform double in [0,1) from a 64-bit state. Used instead of
/// std::uniform_real_distribution so sampled checks are identical across
/// standard libraries.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }
};

} // namespace tilepress

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <thread>
#include <vector>

namespace permlin {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Stream splitting rule: stream k of `seed` is an mt19937_64 seeded with
/// splitmix64(seed ^ splitmix64(k)). Worker w of a parallel job uses stream w.
inline Engine make_stream(std::uint64_t seed, std::uint64_t stream) {
    return Engine(splitmix64(seed ^ splitmix64(stream)));
}

/// Samples [begin, end) handled by worker `w` out of `workers`; the first
/// total % workers workers take one extra.
struct Chunk {
    std::uint64_t begin;
    std::uint64_t end;
};

inline Chunk chunk_for(std::uint64_t total, std::size_t workers, std::size_t w) {
    const std::uint64_t base = total / workers;
    const std::uint64_t extra = total % workers;
    const std::uint64_t begin = w * base + std::min<std::uint64_t>(w, extra);
    return {begin, begin + base + (w < extra ? 1 : 0)};
}

/// Runs fn(w) for w in [0, workers) on separate threads (inline when workers == 1).
template <typename Fn>
void run_workers(std::size_t workers, Fn&& fn) {
    if (workers <= 1) {
        fn(std::size_t{0});
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back([&fn, w] { fn(w); });
    for (auto& t : pool) t.join();
}

class NormalSource {
public:
    explicit NormalSource(Engine engine) : engine_(std::move(engine)) {}

    double operator()() { return dist_(engine_); }
    void fill(std::span<double> out) {
        for (double& v : out) v = dist_(engine_);
    }
    double uniform() { return unif_(engine_); }
    Engine& engine() { return engine_; }

private:
    Engine engine_;
    std::normal_distribution<double> dist_{0.0, 1.0};
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

} // namespace permlin

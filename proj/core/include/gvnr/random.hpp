#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace gvnr {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Child seed for a named stream. All randomness in the library hangs off a
/// single user seed through this function, so a (seed, path) pair always
/// names the same stream regardless of thread scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = splitmix64(seed);
    for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

// Stream tags used with derive_seed.
namespace stream {
inline constexpr std::uint64_t walk_order = 1;
inline constexpr std::uint64_t walk = 2;
inline constexpr std::uint64_t init = 3;
inline constexpr std::uint64_t zeros = 4;
inline constexpr std::uint64_t shuffle = 5;
inline constexpr std::uint64_t split = 6;
inline constexpr std::uint64_t negatives = 7;
inline constexpr std::uint64_t repeat = 8;
inline constexpr std::uint64_t pipeline = 9;
}  // namespace stream

/// mt19937_64 with distribution code written out, so that sequences do not
/// depend on the standard library's (implementation-defined) distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), n > 0. Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Fisher-Yates over any random-access container.
    template <typename Range>
    void shuffle(Range& v) {
        using std::swap;
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace gvnr

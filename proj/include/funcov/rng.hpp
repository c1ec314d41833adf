#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <utility>
#include <vector>

// Seeding and sampling utilities. Generator and distributions are
// implemented here rather than taken from <random> so that streams are
// bit-reproducible across standard library versions. Random streams are
// derived hierarchically from a master seed and an index path, which
// makes any loop over replicates / curves / pairs safe to parallelise:
// the stream for index i never depends on how many draws other indices
// consumed.

namespace funcov::rng {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// SplitMix64 counter generator; construction is free, which matters for
/// the one-engine-per-replicate seeding scheme.
class Engine {
public:
    using result_type = std::uint64_t;
    explicit Engine(std::uint64_t state) : state_(state) {}
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~std::uint64_t{0}; }
    result_type operator()() {
        std::uint64_t x = (state_ += 0x9e3779b97f4a7c15ULL);
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::uint64_t state_;
};

/// Mix a master seed with an index path into a new 64-bit seed.
inline constexpr std::uint64_t derive(std::uint64_t seed,
                                      std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc908ULL);
    for (std::uint64_t v : path) h = splitmix64(h ^ v);
    return h;
}

inline Engine engine(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    return Engine(derive(seed, path));
}

// Stream tags keep independent uses of the same master seed disjoint.
namespace stream {
inline constexpr std::uint64_t gen_independent = 0x11;
inline constexpr std::uint64_t gen_paired = 0x12;
inline constexpr std::uint64_t gen_supplement = 0x13;
inline constexpr std::uint64_t perm_independent = 0x21;
inline constexpr std::uint64_t perm_paired = 0x22;
inline constexpr std::uint64_t perm_trials = 0x23;
inline constexpr std::uint64_t global_pairwise = 0x31;
inline constexpr std::uint64_t global_null = 0x32;
inline constexpr std::uint64_t sim_replicate = 0x41;
} // namespace stream

/// Uniform double in [0, 1).
inline double uniform01(Engine& e) {
    return static_cast<double>(e() >> 11) * 0x1.0p-53;
}

/// Fair coin.
inline bool coin(Engine& e) { return (e() >> 63) != 0; }

/// Uniform integer in [0, n); unbiased via rejection.
inline std::uint64_t uniform_index(Engine& e, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t x = e();
        if (x >= threshold) return x % n;
    }
}

/// One pair of independent standard normals (Box-Muller).
inline std::pair<double, double> normal_pair(Engine& e) {
    // u1 in (0, 1] so the log is finite.
    const double u1 = (static_cast<double>(e() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(e() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

inline double normal(Engine& e) { return normal_pair(e).first; }

/// In-place Fisher-Yates shuffle with explicit index sampling.
template <typename T>
void shuffle(std::vector<T>& v, Engine& e) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_index(e, i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace funcov::rng

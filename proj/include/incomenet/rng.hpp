#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

// Seeded randomness helpers. All draws go through these functions rather
// than std::*_distribution, whose output sequences are implementation
// defined; results here are reproducible for a given seed on any platform.

namespace incomenet::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Independent stream for (seed, index) pairs; used for permutation rounds
// and per-user baseline draws.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x51ed2701)));
}

inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection; n must be > 0.
inline std::uint64_t uniform_below(std::mt19937_64& eng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = eng();
    } while (v >= limit);
    return v % n;
}

inline double normal(std::mt19937_64& eng) {
    double u1 = uniform01(eng);
    while (u1 <= 0.0) u1 = uniform01(eng);
    const double u2 = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline double lognormal(std::mt19937_64& eng, double mu, double sigma) {
    return std::exp(mu + sigma * normal(eng));
}

// Knuth's method; fine for the small means used here.
inline int poisson(std::mt19937_64& eng, double mean) {
    const double limit = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= uniform01(eng);
    } while (p > limit);
    return k - 1;
}

// Geometric on {1, 2, ...} with the given mean (>= 1).
inline std::int64_t geometric_from_mean(std::mt19937_64& eng, double mean) {
    if (mean <= 1.0) return 1;
    const double p = 1.0 / mean;
    double u = uniform01(eng);
    while (u >= 1.0) u = uniform01(eng);
    return 1 + static_cast<std::int64_t>(std::floor(std::log1p(-u) / std::log1p(-p)));
}

template <typename T>
void shuffle(std::mt19937_64& eng, std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_below(eng, i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace incomenet::rng

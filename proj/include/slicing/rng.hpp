#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace slicing {

// Engine output is fully specified by the standard; the draws below avoid
// std::*_distribution so streams are identical across standard libraries.
using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Independent stream derived from a master seed, a purpose name and an index
// (e.g. "arrivals", mu 3). Changing how one stream is consumed never shifts another.
inline Rng make_stream(std::uint64_t master, std::string_view name, std::uint64_t index = 0) {
    const std::uint64_t s = splitmix64(splitmix64(master ^ fnv1a(name)) + index);
    return Rng(s);
}

inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection; n > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

inline int uniform_int(Rng& rng, int lo, int hi) {
    return lo + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

// Poisson by inversion, truncated at `cap` (the tail mass lands on cap).
inline int poisson(Rng& rng, double lambda, int cap) {
    if (lambda <= 0.0) return 0;
    const double u = uniform01(rng);
    double p = std::exp(-lambda);
    double cdf = p;
    int k = 0;
    while (u >= cdf && k < cap) {
        ++k;
        p *= lambda / k;
        cdf += p;
    }
    return k;
}

}  // namespace slicing

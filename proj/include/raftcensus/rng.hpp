#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace raftcensus {

// Distribution helpers with fixed formulas; the standard distributions are
// implementation-defined, and outputs here must match bit for bit across
// toolchains.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Uniform integer in [0, n).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % n;
}

/// Standard normal via Box-Muller (one draw per call).
inline double normal01(Rng& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

template <typename Container>
void shuffle_in_place(Container& c, Rng& rng) {
    for (std::size_t i = c.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(c[i - 1], c[j]);
    }
}

}  // namespace raftcensus

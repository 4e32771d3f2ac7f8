#pragma once

// Seeding and portable variate helpers. The standard distributions are
// implementation-defined, so anything that must reproduce bit-for-bit across
// toolchains goes through these instead.

#include <cmath>
#include <cstdint>
#include <random>

#include "kbarrier/geometry.hpp"

namespace kbarrier::rng {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based seed derivation: the seed of (stream, index) depends only on
/// the master seed and the two counters, never on execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
    return splitmix64(splitmix64(splitmix64(master) ^ stream) ^ (index * 0xD1B54A32D192ED03ULL));
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by rejection (no modulo bias).
template <class Gen>
std::uint64_t bounded(Gen& gen, std::uint64_t bound) {
    using result = typename Gen::result_type;
    const std::uint64_t range = static_cast<std::uint64_t>(Gen::max() - Gen::min());
    const std::uint64_t limit = range - (range % bound + 1) % bound;  // inclusive
    while (true) {
        const std::uint64_t v = static_cast<std::uint64_t>(static_cast<result>(gen() - Gen::min()));
        if (v <= limit || limit == range) return v % bound;
    }
}

/// Pair of independent standard normals (Box-Muller).
inline Point standard_normal_pair(Engine& eng) {
    double u1 = uniform01(eng);
    while (u1 <= 0.0) u1 = uniform01(eng);
    const double u2 = uniform01(eng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * kPi * u2;
    return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace kbarrier::rng

#pragma once

#include <cstdint>
#include <random>

namespace chainpay {

// Every stochastic component uses std::mt19937_64 seeded through
// splitmix64, and draws doubles as (x >> 11) / 2^53. Both are fully
// specified, so runs reproduce bit-for-bit across platforms.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for the index-th independent stream derived from a master seed.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
}

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

}  // namespace chainpay

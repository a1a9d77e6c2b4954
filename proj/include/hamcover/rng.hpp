#pragma once

// Seeded randomness for the whole library.
//
// Every randomized operation takes an explicit 64-bit seed and derives an
// independent stream from it with substream(seed, id). The generator is
// std::mt19937_64, whose output sequence is fixed by the C++ standard, so
// identical (seed, id) pairs reproduce identical results on any platform.
// Substream ids are spaced through splitmix64 so that e.g. graph generation
// and edge partitioning never share a stream.

#include <cstdint>
#include <random>
#include <vector>

namespace hamcover {

// splitmix64 finalizer (Vigna). Bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream_id) {
    return std::mt19937_64(mix64(mix64(seed) ^ stream_id));
}

// Uniform double in [0,1) from the top 53 bits; avoids the
// implementation-defined std::uniform_real_distribution.
inline double unit_real(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection; bound > 0.
inline std::uint64_t below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r = rng();
    while (r >= limit) r = rng();
    return r % bound;
}

template <typename T>
inline void shuffle_vec(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(below(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace hamcover

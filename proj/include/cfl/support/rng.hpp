#pragma once

#include <cstdint>
#include <random>

namespace cfl {

// splitmix64 finalizer; used to derive independent seed streams from
// (seed, index) pairs so parallel workers never share RNG state.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
    return mix64(seed ^ mix64(salt));
}

using Rng = std::mt19937_64;

inline Rng make_rng(uint64_t seed, uint64_t salt) { return Rng(mix_seed(seed, salt)); }

// Uniform integer in [0, n). Avoids std::uniform_int_distribution so results
// are identical across standard library implementations.
inline size_t rand_index(Rng& rng, size_t n) {
    // rejection sampling on the top bits
    uint64_t bound = n;
    uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        uint64_t r = rng();
        if (r >= threshold) return static_cast<size_t>(r % bound);
    }
}

inline double rand_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace cfl

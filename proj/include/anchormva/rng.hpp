#pragma once

#include <cstdint>
#include <random>

namespace anchormva {

/// splitmix64 finalizer; decorrelates nearby seed values.
inline uint64_t mix_bits(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and up to three
/// indices (replicate, grid cell, ...). Used so parallel sweep cells draw
/// identical numbers regardless of scheduling.
inline uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t h = mix_bits(base);
    h = mix_bits(h ^ (a + 0x100000001b3ULL));
    h = mix_bits(h ^ (b + 0xcbf29ce484222325ULL));
    h = mix_bits(h ^ c);
    return h;
}

inline std::mt19937_64 make_rng(uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace anchormva

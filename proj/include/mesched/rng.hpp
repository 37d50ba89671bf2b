#pragma once

#include <cstdint>
#include <random>

namespace mesched {

// splitmix64; used to derive independent sub-seeds (per agent, per unit)
// from a single scenario seed.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    return Rng(split_seed(seed, stream));
}

}  // namespace mesched

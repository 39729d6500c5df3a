#pragma once

#include <cstdint>
#include <random>

namespace hybridgrid {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for run `run_index` of cell `cell_index`.
///
/// The (cell, run) pair is packed into one 64-bit word (cell in the high half,
/// run in the low half) and xor-ed with a mixed seed_base. For a fixed
/// seed_base this is injective as long as both indices stay below 2^32.
constexpr std::uint64_t derive_seed(std::uint64_t seed_base, std::uint64_t cell_index,
                                    std::uint64_t run_index) {
    return mix64(seed_base) ^ ((cell_index << 32) | (run_index & 0xffffffffULL));
}

inline Rng make_rng(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Rng(seq);
}

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace hybridgrid

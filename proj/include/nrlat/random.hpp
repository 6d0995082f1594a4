#pragma once

#include <cstdint>
#include <random>

namespace nrlat {

using Rng = std::mt19937_64;

/// Independent generator for replication `stream` of a run seeded with `seed`.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x6e726c61u};
    return Rng(seq);
}

/// Uniform in [0, 1).
inline double uniform01(Rng& rng) { return std::generate_canonical<double, 53>(rng); }

}  // namespace nrlat

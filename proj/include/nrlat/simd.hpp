#pragma once

#include <cstddef>
#include <cstdint>

namespace nrlat::simd {

/// Grid rows are padded to a multiple of this many 64-bit words so the
/// vector kernels never need a scalar tail.
inline constexpr std::size_t kWordBlock = 4;

inline constexpr std::size_t padded_words(int bits)
{
    const std::size_t words = (static_cast<std::size_t>(bits) + 63) / 64;
    return (words + kWordBlock - 1) / kWordBlock * kWordBlock;
}

/// Bitmap kernels used by the resource grid. `n` is a multiple of kWordBlock.
struct Kernels {
    const char* name;
    /// dst[i] |= src[i]
    void (*or_accumulate)(std::uint64_t* dst, const std::uint64_t* src, std::size_t n);
    /// Number of set bits.
    std::uint64_t (*popcount)(const std::uint64_t* src, std::size_t n);
    /// True if any bit is set in a[i] & b[i].
    bool (*intersects)(const std::uint64_t* a, const std::uint64_t* b, std::size_t n);
};

const Kernels& scalar_kernels();
/// nullptr when the build or the CPU lacks AVX2.
const Kernels* avx2_kernels();

/// AVX2 if available, unless NRLAT_FORCE_SCALAR is set in the environment.
const Kernels& active_kernels();

/// Lowest bit index b such that bits [b, b+run) are all zero in the first
/// `limit` bits, or -1.
int find_zero_run(const std::uint64_t* mask, int limit, int run);

/// Sets bits [first, first+count).
void set_bits(std::uint64_t* row, int first, int count);
/// Clears bits [first, first+count).
void clear_bits(std::uint64_t* row, int first, int count);
/// Builds a mask with bits [first, first+count) set over `n` words.
void range_mask(std::uint64_t* out, std::size_t n, int first, int count);

}  // namespace nrlat::simd

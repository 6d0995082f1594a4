#include <algorithm>
#include <bit>

#include "nrlat/simd.hpp"

namespace nrlat::simd {

namespace {

void or_accumulate_scalar(std::uint64_t* dst, const std::uint64_t* src, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) dst[i] |= src[i];
}

std::uint64_t popcount_scalar(const std::uint64_t* src, std::size_t n)
{
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) total += static_cast<std::uint64_t>(std::popcount(src[i]));
    return total;
}

bool intersects_scalar(const std::uint64_t* a, const std::uint64_t* b, std::size_t n)
{
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc |= a[i] & b[i];
    return acc != 0;
}

}  // namespace

const Kernels& scalar_kernels()
{
    static const Kernels k{"scalar", or_accumulate_scalar, popcount_scalar, intersects_scalar};
    return k;
}

int find_zero_run(const std::uint64_t* mask, int limit, int run)
{
    if (run <= 0) return 0;
    int start = 0;
    while (start + run <= limit) {
        // Skip whole occupied words quickly.
        int b = start;
        int len = 0;
        while (len < run) {
            const std::uint64_t w = mask[b >> 6] >> (b & 63);
            if (w & 1u) break;
            // Free bits available from b within this word.
            const int avail = w == 0 ? 64 - (b & 63) : std::countr_zero(w);
            len += avail;
            b += avail;
            if (b >= limit) break;
        }
        if (len >= run) return start + run <= limit ? start : -1;
        if (b >= limit) return -1;
        // b is occupied; resume after the occupied stretch.
        const std::uint64_t w = ~(mask[b >> 6] >> (b & 63));
        const int busy = w == 0 ? 64 - (b & 63) : std::countr_zero(w);
        start = b + busy;
    }
    return -1;
}

void set_bits(std::uint64_t* row, int first, int count)
{
    for (int b = first; b < first + count;) {
        const int off = b & 63;
        const int take = std::min(64 - off, first + count - b);
        const std::uint64_t m = take == 64 ? ~0ull : (((1ull << take) - 1) << off);
        row[b >> 6] |= m;
        b += take;
    }
}

void clear_bits(std::uint64_t* row, int first, int count)
{
    for (int b = first; b < first + count;) {
        const int off = b & 63;
        const int take = std::min(64 - off, first + count - b);
        const std::uint64_t m = take == 64 ? ~0ull : (((1ull << take) - 1) << off);
        row[b >> 6] &= ~m;
        b += take;
    }
}

void range_mask(std::uint64_t* out, std::size_t n, int first, int count)
{
    for (std::size_t i = 0; i < n; ++i) out[i] = 0;
    set_bits(out, first, count);
}

}  // namespace nrlat::simd

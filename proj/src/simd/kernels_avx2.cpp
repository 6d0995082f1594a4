// Compiled with -mavx2; only reached after a runtime CPU check.
#include <immintrin.h>

#include "nrlat/simd.hpp"

namespace nrlat::simd {

namespace {

void or_accumulate_avx2(std::uint64_t* dst, const std::uint64_t* src, std::size_t n)
{
    for (std::size_t i = 0; i < n; i += 4) {
        __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
        __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_or_si256(a, b));
    }
}

// Nibble lookup popcount, summed per 64-bit lane with SAD.
std::uint64_t popcount_avx2(const std::uint64_t* src, std::size_t n)
{
    const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                         0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low = _mm256_set1_epi8(0x0f);
    __m256i acc = _mm256_setzero_si256();
    for (std::size_t i = 0; i < n; i += 4) {
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
        __m256i lo = _mm256_and_si256(v, low);
        __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low);
        __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(cnt, _mm256_setzero_si256()));
    }
    alignas(32) std::uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

bool intersects_avx2(const std::uint64_t* a, const std::uint64_t* b, std::size_t n)
{
    for (std::size_t i = 0; i < n; i += 4) {
        __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        __m256i y = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        if (!_mm256_testz_si256(x, y)) return true;
    }
    return false;
}

}  // namespace

const Kernels& avx2_kernel_table()
{
    static const Kernels k{"avx2", or_accumulate_avx2, popcount_avx2, intersects_avx2};
    return k;
}

}  // namespace nrlat::simd

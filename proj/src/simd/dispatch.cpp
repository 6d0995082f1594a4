#include <cstdlib>

#include "nrlat/simd.hpp"

namespace nrlat::simd {

#if defined(NRLAT_HAVE_AVX2)
const Kernels& avx2_kernel_table();
#endif

const Kernels* avx2_kernels()
{
#if defined(NRLAT_HAVE_AVX2)
    static const bool ok = __builtin_cpu_supports("avx2");
    return ok ? &avx2_kernel_table() : nullptr;
#else
    return nullptr;
#endif
}

const Kernels& active_kernels()
{
    static const Kernels* chosen = [] {
        const char* force = std::getenv("NRLAT_FORCE_SCALAR");
        if (force != nullptr && *force != '\0' && *force != '0') return &scalar_kernels();
        const Kernels* v = avx2_kernels();
        return v != nullptr ? v : &scalar_kernels();
    }();
    return *chosen;
}

}  // namespace nrlat::simd

#include <cstdlib>

#include "wikinli/kernels.hpp"

namespace wikinli::kernels {

namespace {

bool want_simd() {
    const char* env = std::getenv("WIKINLI_NO_SIMD");
    return env == nullptr || env[0] == '\0' || env[0] == '0';
}

bool cpu_has_avx2() {
#if defined(WIKINLI_HAVE_AVX2_BUILD) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const bool g_use_avx2 = cpu_has_avx2() && want_simd();

}  // namespace

bool avx2_available() { return cpu_has_avx2(); }

const char* active_variant() { return g_use_avx2 ? "avx2" : "scalar"; }

#if defined(WIKINLI_HAVE_AVX2_BUILD)
double (*dot)(const double*, const double*, size_t) = g_use_avx2 ? avx2::dot : scalar::dot;
void (*axpy)(double, const double*, double*, size_t) = g_use_avx2 ? avx2::axpy : scalar::axpy;
double (*reduce_add)(const double*, size_t) = g_use_avx2 ? avx2::reduce_add : scalar::reduce_add;
double (*reduce_sqdev)(const double*, size_t, double) =
    g_use_avx2 ? avx2::reduce_sqdev : scalar::reduce_sqdev;
void (*scale_shift)(double*, size_t, double, double) =
    g_use_avx2 ? avx2::scale_shift : scalar::scale_shift;
#else
double (*dot)(const double*, const double*, size_t) = scalar::dot;
void (*axpy)(double, const double*, double*, size_t) = scalar::axpy;
double (*reduce_add)(const double*, size_t) = scalar::reduce_add;
double (*reduce_sqdev)(const double*, size_t, double) = scalar::reduce_sqdev;
void (*scale_shift)(double*, size_t, double, double) = scalar::scale_shift;
#endif

}  // namespace wikinli::kernels

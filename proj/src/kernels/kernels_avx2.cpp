// AVX2+FMA variants. This translation unit is compiled with -mavx2 -mfma;
// nothing here may be called unless the runtime CPU check passed.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "wikinli/kernels.hpp"

namespace wikinli::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

}  // namespace

double dot(const double* a, const double* b, size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double reduce_add(const double* a, size_t n) {
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i];
    return s;
}

double reduce_sqdev(const double* a, size_t n, double mean) {
    const __m256d vm = _mm256_set1_pd(mean);
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), vm);
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = a[i] - mean;
        s += d * d;
    }
    return s;
}

void scale_shift(double* a, size_t n, double scale, double shift) {
    const __m256d vs = _mm256_set1_pd(scale);
    const __m256d vh = _mm256_set1_pd(shift);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(a + i);
        _mm256_storeu_pd(a + i, _mm256_fmadd_pd(v, vs, vh));
    }
    for (; i < n; ++i) a[i] = a[i] * scale + shift;
}

}  // namespace wikinli::kernels::avx2

#endif  // x86-64

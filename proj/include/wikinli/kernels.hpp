#pragma once

#include <cstddef>

// Dense double-precision kernels behind the classifier and featurizer hot
// loops (logit rows, gradient accumulation, z-score statistics).
//
// Layout follows the usual scalar-reference-plus-SIMD pattern:
//   kernels::scalar::*  portable reference implementations
//   kernels::avx2::*    AVX2+FMA variants, compiled only on x86-64
//   kernels::dot etc.   function pointers resolved once at startup
//
// The dispatched entry points pick AVX2 when the CPU reports it and the
// binary carries the variant, scalar otherwise. Setting WIKINLI_NO_SIMD=1
// in the environment forces scalar. Selection is fixed for the lifetime of
// the process, so repeated runs on one machine stay bit-identical.
//
// SIMD and scalar results may differ in the last few ulps (different
// accumulation order); the equivalence tests bound the relative error.

namespace wikinli::kernels {

namespace scalar {
double dot(const double* a, const double* b, size_t n);
void axpy(double alpha, const double* x, double* y, size_t n);
double reduce_add(const double* a, size_t n);
double reduce_sqdev(const double* a, size_t n, double mean);
void scale_shift(double* a, size_t n, double scale, double shift);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* a, const double* b, size_t n);
void axpy(double alpha, const double* x, double* y, size_t n);
double reduce_add(const double* a, size_t n);
double reduce_sqdev(const double* a, size_t n, double mean);
void scale_shift(double* a, size_t n, double scale, double shift);
}  // namespace avx2
#endif

// Dispatched entry points.
extern double (*dot)(const double*, const double*, size_t);
extern void (*axpy)(double, const double*, double*, size_t);
extern double (*reduce_add)(const double*, size_t);
extern double (*reduce_sqdev)(const double*, size_t, double);
extern void (*scale_shift)(double*, size_t, double, double);

// Name of the active variant: "avx2" or "scalar".
const char* active_variant();

// True when the AVX2 variants are compiled in and usable on this CPU.
bool avx2_available();

}  // namespace wikinli::kernels

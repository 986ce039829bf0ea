#include "wikinli/kernels.hpp"

namespace wikinli::kernels::scalar {

double dot(const double* a, const double* b, size_t n) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double reduce_add(const double* a, size_t n) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += a[i];
    return s;
}

double reduce_sqdev(const double* a, size_t n, double mean) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double d = a[i] - mean;
        s += d * d;
    }
    return s;
}

void scale_shift(double* a, size_t n, double scale, double shift) {
    for (size_t i = 0; i < n; ++i) a[i] = a[i] * scale + shift;
}

}  // namespace wikinli::kernels::scalar

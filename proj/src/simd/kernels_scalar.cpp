#include "psq/kernels.h"

namespace psq::kernels::scalar {

void tridiag_step(const double* in, const double* down, double up, double* out, std::size_t n) {
    if (n == 0) return;
    if (n == 1) {
        out[0] = 0.0;
        return;
    }
    out[0] = in[1] * down[1];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out[i] = in[i - 1] * up + in[i + 1] * down[i + 1];
    }
    out[n - 1] = in[n - 2] * up;
}

double weighted_sum(const double* w, const double* a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i];
    return s;
}

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

void accumulate_product(double c, const double* a, const double* b, double* acc, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += c * a[i] * b[i];
}

void recurrence_step(double ca, double cb, const double* x, const double* cur, const double* prev,
                     double* next, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) next[i] = ca * x[i] * cur[i] - cb * prev[i];
}

void horner_step(const double* x, const double* prev, double c, const double* a, double* out,
                 std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * prev[i] + c * a[i];
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

}  // namespace psq::kernels::scalar

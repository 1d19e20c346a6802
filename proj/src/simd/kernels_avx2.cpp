// Compiled with -mavx2 -mfma. Only reached through the dispatcher after a
// CPUID check, so nothing here may run at static-initialization time.

#include "psq/kernels.h"

#include <immintrin.h>

namespace psq::kernels::avx2 {

namespace {

constexpr std::size_t kLanes = 4;

inline double horizontal_sum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    const __m128d swapped = _mm_unpackhi_pd(pair, pair);
    return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

}  // namespace

void tridiag_step(const double* in, const double* down, double up, double* out, std::size_t n) {
    if (n < 2 + kLanes) {
        // Too short for the vector body to cover anything but the boundaries.
        scalar::tridiag_step(in, down, up, out, n);
        return;
    }
    out[0] = in[1] * down[1];
    const __m256d vup = _mm256_set1_pd(up);
    std::size_t i = 1;
    for (; i + kLanes < n; i += kLanes) {
        const __m256d left = _mm256_loadu_pd(in + i - 1);
        const __m256d right = _mm256_loadu_pd(in + i + 1);
        const __m256d rate = _mm256_loadu_pd(down + i + 1);
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(right, rate, _mm256_mul_pd(left, vup)));
    }
    for (; i + 1 < n; ++i) {
        out[i] = in[i - 1] * up + in[i + 1] * down[i + 1];
    }
    out[n - 1] = in[n - 2] * up;
}

double weighted_sum(const double* w, const double* a, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i + kLanes), _mm256_loadu_pd(a + i + kLanes), acc1);
    }
    for (; i + kLanes <= n; i += kLanes) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i), acc0);
    }
    double s = horizontal_sum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += w[i] * a[i];
    return s;
}

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
        const __m256d wa0 = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
        const __m256d wa1 =
            _mm256_mul_pd(_mm256_loadu_pd(w + i + kLanes), _mm256_loadu_pd(a + i + kLanes));
        acc0 = _mm256_fmadd_pd(wa0, _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(wa1, _mm256_loadu_pd(b + i + kLanes), acc1);
    }
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
        acc0 = _mm256_fmadd_pd(wa, _mm256_loadu_pd(b + i), acc0);
    }
    double s = horizontal_sum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

void accumulate_product(double c, const double* a, const double* b, double* acc, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d ca = _mm256_mul_pd(vc, _mm256_loadu_pd(a + i));
        _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(ca, _mm256_loadu_pd(b + i), _mm256_loadu_pd(acc + i)));
    }
    for (; i < n; ++i) acc[i] += c * a[i] * b[i];
}

void recurrence_step(double ca, double cb, const double* x, const double* cur, const double* prev,
                     double* next, std::size_t n) {
    const __m256d vca = _mm256_set1_pd(ca);
    const __m256d vcb = _mm256_set1_pd(cb);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d t = _mm256_mul_pd(_mm256_mul_pd(vca, _mm256_loadu_pd(x + i)), _mm256_loadu_pd(cur + i));
        _mm256_storeu_pd(next + i, _mm256_fnmadd_pd(vcb, _mm256_loadu_pd(prev + i), t));
    }
    for (; i < n; ++i) next[i] = ca * x[i] * cur[i] - cb * prev[i];
}

void horner_step(const double* x, const double* prev, double c, const double* a, double* out,
                 std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d ca = _mm256_mul_pd(vc, _mm256_loadu_pd(a + i));
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(prev + i), ca));
    }
    for (; i < n; ++i) out[i] = x[i] * prev[i] + c * a[i];
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

}  // namespace psq::kernels::avx2

#pragma once

// Data-parallel inner loops shared by the quadrature engine and the Markov
// oracle. Each kernel has a scalar reference implementation and an AVX2/FMA
// variant; the variant is picked once at runtime from CPUID and can be
// overridden for equivalence testing.
//
// The AVX2 variants reorder floating-point sums, so they agree with the scalar
// reference to rounding, not bit for bit.

#include <span>
#include <string_view>

namespace psq::kernels {

enum class Isa { scalar, avx2 };

bool avx2_supported() noexcept;
Isa active_isa() noexcept;
std::string_view isa_name(Isa isa) noexcept;

// Throws DomainError when avx2 is requested on a CPU without AVX2/FMA.
void force_isa(Isa isa);
// Back to the CPUID choice (or scalar when PSQ_FORCE_SCALAR is set).
void reset_isa() noexcept;

// out[i] = in[i-1] * up + in[i+1] * down[i+1]   (in[-1] = in[n] = 0)
// i.e. one step of a row vector through a birth-death sub-matrix with
// constant up-rate and per-state down-rates. All spans have the same size.
void tridiag_step(std::span<const double> in, std::span<const double> down, double up,
                  std::span<double> out);

// sum_i w[i] * a[i]
double weighted_sum(std::span<const double> w, std::span<const double> a);

// sum_i w[i] * a[i] * b[i]
double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);

// acc[i] += c * a[i] * b[i]
void accumulate_product(double c, std::span<const double> a, std::span<const double> b,
                        std::span<double> acc);

// next[i] = ca * x[i] * cur[i] - cb * prev[i]   (three-term recurrence across nodes)
void recurrence_step(double ca, double cb, std::span<const double> x,
                     std::span<const double> cur, std::span<const double> prev,
                     std::span<double> next);

// out[i] = x[i] * prev[i] + c * a[i]   (Horner-style accumulation)
void horner_step(std::span<const double> x, std::span<const double> prev, double c,
                 std::span<const double> a, std::span<double> out);

// out[i] = a[i] * b[i]
void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out);

namespace scalar {
void tridiag_step(const double* in, const double* down, double up, double* out, std::size_t n);
double weighted_sum(const double* w, const double* a, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);
void accumulate_product(double c, const double* a, const double* b, double* acc, std::size_t n);
void recurrence_step(double ca, double cb, const double* x, const double* cur, const double* prev,
                     double* next, std::size_t n);
void horner_step(const double* x, const double* prev, double c, const double* a, double* out,
                 std::size_t n);
void multiply(const double* a, const double* b, double* out, std::size_t n);
}  // namespace scalar

namespace avx2 {
void tridiag_step(const double* in, const double* down, double up, double* out, std::size_t n);
double weighted_sum(const double* w, const double* a, std::size_t n);
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n);
void accumulate_product(double c, const double* a, const double* b, double* acc, std::size_t n);
void recurrence_step(double ca, double cb, const double* x, const double* cur, const double* prev,
                     double* next, std::size_t n);
void horner_step(const double* x, const double* prev, double c, const double* a, double* out,
                 std::size_t n);
void multiply(const double* a, const double* b, double* out, std::size_t n);
}  // namespace avx2

}  // namespace psq::kernels

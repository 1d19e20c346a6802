#include "psq/errors.h"
#include "psq/kernels.h"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

namespace psq::kernels {

namespace {

bool cpu_has_avx2_fma() noexcept {
#if defined(PSQ_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__)) && defined(__GNUC__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa detect() noexcept {
    if (const char* env = std::getenv("PSQ_FORCE_SCALAR"); env != nullptr && std::string(env) != "0") {
        return Isa::scalar;
    }
    return cpu_has_avx2_fma() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() noexcept {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

bool use_avx2() noexcept { return current().load(std::memory_order_relaxed) == Isa::avx2; }

}  // namespace

bool avx2_supported() noexcept {
    static const bool supported = cpu_has_avx2_fma();
    return supported;
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void force_isa(Isa isa) {
    if (isa == Isa::avx2 && !avx2_supported()) {
        throw DomainError("AVX2/FMA kernels requested but not supported by this CPU or build");
    }
    current().store(isa, std::memory_order_relaxed);
}

void reset_isa() noexcept { current().store(detect(), std::memory_order_relaxed); }

#if defined(PSQ_HAVE_AVX2)
#define PSQ_DISPATCH(fn, ...) (use_avx2() ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define PSQ_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void tridiag_step(std::span<const double> in, std::span<const double> down, double up,
                  std::span<double> out) {
    assert(in.size() == out.size() && down.size() == in.size());
    PSQ_DISPATCH(tridiag_step, in.data(), down.data(), up, out.data(), in.size());
}

double weighted_sum(std::span<const double> w, std::span<const double> a) {
    assert(w.size() == a.size());
    return PSQ_DISPATCH(weighted_sum, w.data(), a.data(), w.size());
}

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b) {
    assert(w.size() == a.size() && a.size() == b.size());
    return PSQ_DISPATCH(weighted_dot, w.data(), a.data(), b.data(), w.size());
}

void accumulate_product(double c, std::span<const double> a, std::span<const double> b,
                        std::span<double> acc) {
    assert(a.size() == acc.size() && b.size() == acc.size());
    PSQ_DISPATCH(accumulate_product, c, a.data(), b.data(), acc.data(), acc.size());
}

void recurrence_step(double ca, double cb, std::span<const double> x,
                     std::span<const double> cur, std::span<const double> prev,
                     std::span<double> next) {
    assert(x.size() == next.size() && cur.size() == next.size() && prev.size() == next.size());
    PSQ_DISPATCH(recurrence_step, ca, cb, x.data(), cur.data(), prev.data(), next.data(), next.size());
}

void horner_step(std::span<const double> x, std::span<const double> prev, double c,
                 std::span<const double> a, std::span<double> out) {
    assert(x.size() == out.size() && prev.size() == out.size() && a.size() == out.size());
    PSQ_DISPATCH(horner_step, x.data(), prev.data(), c, a.data(), out.data(), out.size());
}

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    assert(a.size() == out.size() && b.size() == out.size());
    PSQ_DISPATCH(multiply, a.data(), b.data(), out.data(), out.size());
}

#undef PSQ_DISPATCH

}  // namespace psq::kernels

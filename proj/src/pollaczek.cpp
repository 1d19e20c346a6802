#include "psq/pollaczek.h"

#include "psq/kernels.h"

#include <cmath>
#include <numbers>
#include <string>

namespace psq {

namespace {

constexpr double kPi = std::numbers::pi;

void require_angle(double theta) {
    if (!(theta >= 0.0 && theta <= kPi)) {
        throw DomainError("theta must lie in [0, pi], got " + describe(theta));
    }
}

}  // namespace

double eval_Q(int n, double x, const QueueParameters& params) {
    if (n < 0) throw DomainError("polynomial degree must be >= 0");
    const double rho = params.rho();
    double prev = 0.0;
    double cur = 1.0;
    for (int k = 0; k < n; ++k) {
        const double kk = static_cast<double>(k);
        const double next = ((kk + 1.0) * (1.0 + rho) * x * cur - kk * prev) / ((kk + 1.0) * rho);
        prev = cur;
        cur = next;
    }
    return cur;
}

double eval_pollaczek(int n, double y, double a, double b) {
    if (n < 0) throw DomainError("polynomial degree must be >= 0");
    if (!(a >= std::abs(b))) throw DomainError("Pollaczek parameters need a >= |b|");
    double prev = 0.0;
    double cur = 1.0;
    for (int k = 0; k < n; ++k) {
        const double kk = static_cast<double>(k);
        const double next = (((2.0 * kk + 1.0 + a) * y + b) * cur - kk * prev) / (kk + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double pollaczek_tau(double theta, double a, double b) {
    return (a * std::cos(theta) + b) / (2.0 * std::sin(theta));
}

double pollaczek_weight(double y, double a, double b) {
    if (!(std::abs(y) < 1.0)) return 0.0;
    const double theta = std::acos(y);
    const double tau = pollaczek_tau(theta, a, b);
    const double u = kPi * std::abs(tau);
    // 1 / (2 cosh(pi tau)) = exp(-|pi tau|) / (1 + exp(-2 |pi tau|))
    const double log_w = (2.0 * theta - kPi) * tau - u - std::log1p(std::exp(-2.0 * u));
    return std::exp(log_w);
}

double gen_P(double theta, double z) {
    require_angle(theta);
    if (theta == 0.0) {
        if (!(z < 1.0)) throw SingularityError("P(0, z) is singular for z >= 1");
        return std::exp(z / (1.0 - z)) / (1.0 - z);
    }
    if (theta == kPi) {
        if (!(z > -1.0)) throw SingularityError("P(pi, z) is singular for z <= -1");
        return std::exp(-z / (1.0 + z)) / (1.0 + z);
    }
    if (!(std::abs(z) < 1.0)) throw DomainError("P(theta, z) needs |z| < 1 for interior theta");
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const double modulus_sq = 1.0 - 2.0 * z * c + z * z;
    const double arg = std::atan2(z * s, 1.0 - z * c);
    return std::exp(-0.5 * std::log(modulus_sq) + (c / s) * arg);
}

double gen_Q(double x, double z, const QueueParameters& params) {
    const double bound = params.support_bound();
    if (!(std::abs(x) < bound)) throw DomainError("x must lie in the open support of dpsi");
    if (!(std::abs(z) < params.sqrt_rho())) {
        throw DivergenceError("Q(x; z) diverges for |z| >= sqrt(rho)");
    }
    return gen_P(std::acos(x / bound), z / params.sqrt_rho());
}

double phi(double theta, const QueueParameters& params) {
    require_angle(theta);
    const double s = params.sqrt_rho();
    return std::atan2(s * std::sin(theta), 1.0 - s * std::cos(theta));
}

std::vector<double> quadrature_moments(int n_max, const SpectralMeasure& measure) {
    if (n_max < 0) throw DomainError("moment count must be >= 0");
    const auto x = measure.x();
    std::vector<double> power(measure.size(), 1.0);
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        // Odd moments vanish by the exact node symmetry; summing them would
        // only expose the reduction order.
        out[static_cast<std::size_t>(n)] = n % 2 == 1 ? 0.0 : kernels::weighted_sum(measure.weights(), power);
        kernels::multiply(power, x, power);
    }
    return out;
}

VerifiedMoments verified_moments(int n_max, const QueueParameters& params,
                                 const SpectralMeasure& measure, double rel_tol,
                                 std::size_t first_rung) {
    const std::vector<double> quad = quadrature_moments(n_max, measure);
    int failing = 0;
    for (std::size_t rung = first_rung; rung < kPrecisionLadder.size(); ++rung) {
        VerifiedMoments vm;
        failing = with_precision_rung(rung, [&]<class Real>() {
            const auto table = build_coefficient_table<Real>(n_max, params);
            const int bad = first_moment_mismatch(table, quad, n_max, rel_tol);
            if (bad < 0) {
                vm.values = moments(n_max, MomentMethod::recursion, table, measure);
                for (int n = 0; n <= n_max; n += 2) {
                    const double q = quad[static_cast<std::size_t>(n)];
                    const double d = std::abs(vm.values[static_cast<std::size_t>(n)] - q) / std::abs(q);
                    vm.max_rel_diff = std::max(vm.max_rel_diff, d);
                }
            }
            return bad;
        });
        if (failing < 0) {
            vm.rung = rung;
            vm.digits10 = kPrecisionLadder[rung];
            return vm;
        }
    }
    throw PrecisionEscalationError("moment recursion disagrees with quadrature at n = " +
                                       std::to_string(failing) + " even at " +
                                       std::to_string(kPrecisionLadder.back()) + " digits",
                                   failing);
}

}  // namespace psq

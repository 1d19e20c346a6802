#include "psq/asymptotics.h"

#include "psq/errors.h"

#include <cmath>
#include <numbers>
#include <string>

namespace psq {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_index(int j) {
    if (j < 1) throw DomainError("asymptotic index must be >= 1, got " + std::to_string(j));
}

double log_base(const QueueParameters& p) { return std::log(p.support_bound()); }

}  // namespace

double log_delta_asymptote(const QueueParameters& params, int j) {
    require_positive_index(j);
    const double rho = params.rho();
    const double jj = static_cast<double>(j);
    const double log_prefactor = std::log(4.0 / (1.0 - rho)) + 2.0 * (1.0 + rho) / (1.0 - rho) +
                                 0.5 * std::log(8.0 / 3.0 * std::pow(kPi / 2.0, 5.0 / 3.0));
    const double log_r = -(5.0 / 6.0) * std::log(jj) - 3.0 * std::pow(kPi / 2.0, 2.0 / 3.0) * std::cbrt(jj) +
                         2.0 * jj * log_base(params);
    return log_prefactor + log_r;
}

double delta_asymptote(const QueueParameters& params, int j) { return std::exp(log_delta_asymptote(params, j)); }

double log_moment_asymptote(const QueueParameters& params, int n) {
    if (n < 2 || n % 2 != 0) {
        throw DomainError("moment asymptote needs an even index >= 2 (odd moments vanish), got " +
                          std::to_string(n));
    }
    const double nn = static_cast<double>(n);
    return std::log(2.0) + 1.0 + nn * log_base(params) - (5.0 / 6.0) * std::log(nn) +
           0.5 * std::log(8.0 * std::pow(kPi, 5.0 / 3.0) / 3.0) - 1.5 * std::pow(kPi, 2.0 / 3.0) * std::cbrt(nn);
}

double moment_asymptote(const QueueParameters& params, int n) { return std::exp(log_moment_asymptote(params, n)); }

double log_b_asymptote(const QueueParameters& params, int j) {
    require_positive_index(j);
    const double rho = params.rho();
    const double jj = static_cast<double>(j);
    return std::log((1.0 + rho) / (rho * (1.0 - rho) * std::sqrt(kPi))) - 1.5 * std::log(jj) +
           jj * params.decay_rate();
}

double b_asymptote(const QueueParameters& params, int j) { return std::exp(log_b_asymptote(params, j)); }

double log_btilde_asymptote(const QueueParameters& params, int j) {
    require_positive_index(j);
    const double rho = params.rho();
    const double jj = static_cast<double>(j);
    return std::log(4.0 * (1.0 + rho) / (std::pow(1.0 - rho, 3) * std::sqrt(kPi))) - 2.5 * std::log(jj) +
           jj * params.decay_rate();
}

double btilde_asymptote(const QueueParameters& params, int j) {
    return std::exp(log_btilde_asymptote(params, j));
}

DecayDiagnostics decay_diagnostics(const Pmf& delta, const Pmf& btilde, const QueueParameters& params,
                                   int lo, int hi) {
    if (hi - lo < 2) throw DiagnosticsError("decay window needs at least three indices");
    const int covered = std::min(delta.max_index(), btilde.max_index());
    if (lo < std::max(delta.offset(), btilde.offset()) || hi + 1 > covered) {
        throw DiagnosticsError("decay window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                               "] (plus one) not covered by both tables");
    }
    DecayDiagnostics d;
    d.decay_rate = params.decay_rate();
    d.ratio_decreasing = true;
    d.delta_below_btilde = true;
    for (int j = lo; j <= hi; ++j) {
        const double p0 = delta.at(j);
        const double p1 = delta.at(j + 1);
        const double q0 = btilde.at(j);
        const double q1 = btilde.at(j + 1);
        if (!(std::min({p0, p1, q0, q1}) > 1e-300)) {
            throw DiagnosticsError("entry at j = " + std::to_string(j) + " below representable range");
        }
        DecayRow r{j, std::log(p1 / p0), std::log(q1 / q0), p0 / q0};
        if (!d.rows.empty() && !(r.ratio < d.rows.back().ratio)) d.ratio_decreasing = false;
        if (!(p0 <= q0)) d.delta_below_btilde = false;
        d.rows.push_back(r);
    }
    return d;
}

}  // namespace psq

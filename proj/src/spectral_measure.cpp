#include "psq/spectral_measure.h"

#include "psq/errors.h"

#include <cmath>
#include <numbers>
#include <string>

namespace psq {

namespace {

constexpr double kPi = std::numbers::pi;

double log_cosh(double u) {
    const double a = std::abs(u);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

}  // namespace

GaussRule gauss_legendre(int order) {
    if (order < 1) throw DomainError("Gauss-Legendre order must be >= 1");
    const auto n = static_cast<std::size_t>(order);
    GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on the Legendre recurrence.
        double z = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = z;
            for (std::size_t k = 2; k <= n; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * z * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        if (n == 1) {
            z = 0.0;
            dp = 1.0;  // P_1'(0)
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

double measure_density_theta(double theta, const QueueParameters& /*params*/) {
    if (!(theta >= 0.0 && theta <= kPi)) {
        throw DomainError("theta must lie in [0, pi], got " + describe(theta));
    }
    if (theta == 0.0 || theta == kPi) return 0.0;
    const double s = std::sin(theta);
    const double c = std::cos(theta) / s;
    const double log_density = std::log(s) - log_cosh(0.5 * kPi * c) + c * (theta - 0.5 * kPi);
    return std::exp(log_density);
}

double measure_density_x(double x, const QueueParameters& params) {
    const double b = params.support_bound();
    if (!(std::abs(x) < b)) return 0.0;
    const double theta = std::acos(x / b);
    return measure_density_theta(theta, params) / (b * std::sin(theta));
}

std::vector<double> half_interval_breakpoints(int half_panels) {
    std::vector<double> breaks{0.0};
    if (half_panels <= 1) {
        breaks.push_back(0.5 * kPi);
        return breaks;
    }
    const int graded = std::max(1, half_panels / 4);
    const int uniform = half_panels - graded;
    const double knee = kPi / 8.0;
    for (int k = graded - 1; k >= 0; --k) breaks.push_back(std::ldexp(knee, -k));
    for (int k = 1; k <= uniform; ++k) {
        breaks.push_back(knee + (0.5 * kPi - knee) * static_cast<double>(k) / uniform);
    }
    breaks.back() = 0.5 * kPi;
    return breaks;
}

SpectralMeasure build_quadrature(const QueueParameters& params, int panels, int order) {
    if (panels < 1) throw DomainError("quadrature needs panels >= 1");
    if (order < 2) throw DomainError("quadrature needs order >= 2");

    const GaussRule rule = gauss_legendre(order);
    const std::vector<double> breaks = half_interval_breakpoints((panels + 1) / 2);

    // Lower half first, then the mirror image, so weight i and weight
    // i + half are identical and x flips sign exactly.
    std::vector<double> theta_lo;
    std::vector<double> weight_lo;
    std::vector<double> raw_lo;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p];
        const double b = breaks[p + 1];
        const double mid = 0.5 * (a + b);
        const double rad = 0.5 * (b - a);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double t = mid + rad * rule.nodes[k];
            theta_lo.push_back(t);
            raw_lo.push_back(rad * rule.weights[k]);
            weight_lo.push_back(raw_lo.back() * measure_density_theta(t, params));
        }
    }

    SpectralMeasure m(params);
    m.panels_ = 2 * static_cast<int>(breaks.size() - 1);
    m.order_ = order;
    const std::size_t half = theta_lo.size();
    m.theta_.resize(2 * half);
    m.cos_theta_.resize(2 * half);
    m.x_.resize(2 * half);
    m.weights_.resize(2 * half);
    m.dtheta_weights_.resize(2 * half);
    const double bound = params.support_bound();
    for (std::size_t i = 0; i < half; ++i) {
        const double c = std::cos(theta_lo[i]);
        m.theta_[i] = theta_lo[i];
        m.cos_theta_[i] = c;
        m.x_[i] = bound * c;
        m.weights_[i] = weight_lo[i];
        m.dtheta_weights_[i] = raw_lo[i];
        m.dtheta_weights_[half + i] = raw_lo[i];
        m.theta_[half + i] = kPi - theta_lo[i];
        m.cos_theta_[half + i] = -c;
        m.x_[half + i] = -bound * c;
        m.weights_[half + i] = weight_lo[i];
    }

    double mass = 0.0;
    for (double w : m.weights_) mass += w;
    m.mass_error_ = std::abs(mass - 1.0);
    if (m.mass_error_ > 1e-6) {
        throw QuadratureDiagnosticError("spectral quadrature total mass off by " +
                                        std::to_string(m.mass_error_));
    }
    return m;
}

}  // namespace psq

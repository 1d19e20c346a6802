#pragma once

#include "psq/model.h"

#include <span>
#include <vector>

namespace psq {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Throws DomainError for order < 1.
GaussRule gauss_legendre(int order);

// Density of the orthogonality measure dpsi in the angle parametrization
// x = support_bound * cos(theta):
//   sin(theta) / cosh(pi cot(theta) / 2) * exp(cot(theta) (theta - pi/2)).
// Evaluated in log space; zero at both endpoints. The closed form does not
// depend on the load, the parameters only fix the x scale.
// Throws DomainError for theta outside [0, pi].
double measure_density_theta(double theta, const QueueParameters& params);

// dpsi/dx on the open support (-support_bound, support_bound); zero outside.
double measure_density_x(double x, const QueueParameters& params);

// Composite Gauss-Legendre discretization of dpsi in theta. Panels are
// refined geometrically towards both endpoints and mirrored about pi/2, so
// nodes come in exact pairs (x, -x) with identical weights.
class SpectralMeasure {
public:
    const QueueParameters& params() const noexcept { return params_; }
    int panels() const noexcept { return panels_; }
    int order() const noexcept { return order_; }
    std::size_t size() const noexcept { return theta_.size(); }

    std::span<const double> theta() const noexcept { return theta_; }
    std::span<const double> cos_theta() const noexcept { return cos_theta_; }
    std::span<const double> x() const noexcept { return x_; }
    // Quadrature weight times the theta-density: sum_i weights[i] f(x[i])
    // approximates the integral of f against dpsi.
    std::span<const double> weights() const noexcept { return weights_; }
    // Plain d theta weights of the same rule, without the density.
    std::span<const double> dtheta_weights() const noexcept { return dtheta_weights_; }

    double density_theta(double theta) const { return measure_density_theta(theta, params_); }
    double density_x(double x) const { return measure_density_x(x, params_); }

    // |sum of weights - 1|
    double mass_error() const noexcept { return mass_error_; }

    // Integral of f(x) dpsi(x).
    template <class F>
    double integrate(F&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < x_.size(); ++i) s += weights_[i] * f(x_[i]);
        return s;
    }

    // Integral of f(theta) dpsi(theta).
    template <class F>
    double integrate_theta(F&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < theta_.size(); ++i) s += weights_[i] * f(theta_[i]);
        return s;
    }

private:
    friend SpectralMeasure build_quadrature(const QueueParameters&, int, int);
    explicit SpectralMeasure(const QueueParameters& params) : params_(params) {}

    QueueParameters params_;
    int panels_ = 0;
    int order_ = 0;
    std::vector<double> theta_;
    std::vector<double> cos_theta_;
    std::vector<double> x_;
    std::vector<double> weights_;
    std::vector<double> dtheta_weights_;
    double mass_error_ = 0.0;
};

// Breakpoints of the composite rule on [0, pi/2]; exposed for the generic
// Pollaczek-weight checks, which integrate against other weights.
std::vector<double> half_interval_breakpoints(int half_panels);

// Throws DomainError for panels < 1 or order < 2, and
// QuadratureDiagnosticError when the total mass misses 1 by more than 1e-6.
SpectralMeasure build_quadrature(const QueueParameters& params, int panels = 64, int order = 20);

}  // namespace psq

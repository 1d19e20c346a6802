#pragma once

// Pollaczek polynomials P_n(cos theta; 1, 0), the rescaled family
//   Q_n(x) = rho^{-n/2} P_n(cos theta; 1, 0),   x = support_bound * cos theta,
// their monomial coefficients and the moments of dpsi.

#include "psq/errors.h"
#include "psq/extended.h"
#include "psq/model.h"
#include "psq/spectral_measure.h"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace psq {

// Forward three-term recurrence
//   Q_{n+1} = [(n+1)(1+rho) x Q_n - n Q_{n-1}] / ((n+1) rho),  Q_{-1} = 0, Q_0 = 1.
// Throws DomainError for n < 0.
double eval_Q(int n, double x, const QueueParameters& params);

// Generic Pollaczek polynomial P_n(y; a, b) on [-1, 1]:
//   (n+1) P_{n+1} = ((2n+1+a) y + b) P_n - n P_{n-1},  P_{-1} = 0, P_0 = 1.
// Throws DomainError unless a >= |b| and n >= 0.
double eval_pollaczek(int n, double y, double a, double b);

// tau(theta) = (a cos theta + b) / (2 sin theta)
double pollaczek_tau(double theta, double a, double b);

// Weight w(y; a, b) = exp((2 theta - pi) tau) / (2 cosh(pi tau)), y = cos theta,
// in log space; zero at y = +-1. The P_n are orthogonal under it with
// squared norm 1 / (2n + 1 + a).
double pollaczek_weight(double y, double a, double b);

// P(theta, z) = (1 - 2 z cos theta + z^2)^{-1/2} exp(cot theta * atan2(z sin theta, 1 - z cos theta))
// = sum_n P_n(cos theta; 1, 0) z^n. At theta = 0 and theta = pi the limits
//   exp(z/(1-z))/(1-z)   and   exp(-z/(1+z))/(1+z).
// Throws SingularityError for z >= 1 at theta = 0 (z <= -1 at theta = pi),
// DomainError for |z| >= 1 in the interior or theta outside [0, pi].
double gen_P(double theta, double z);

// Q(x; z) = sum_n Q_n(x) z^n = P(theta, z / sqrt(rho)).
// Throws DivergenceError for |z| >= sqrt(rho), DomainError outside the open support.
double gen_Q(double x, double z, const QueueParameters& params);

// Argument of 1 / (1 - sqrt(rho) e^{i theta}):
//   1 - sqrt(rho) e^{i theta} = sqrt(1 + rho - 2 sqrt(rho) cos theta) e^{-i phi(theta)}.
// Continuous on [0, pi], zero at both ends. Throws DomainError outside [0, pi].
double phi(double theta, const QueueParameters& params);

// Rows beyond this are refused: the triangle is quadratic in memory and the
// working precision needed grows linearly in n.
inline constexpr int kMaxCoefficientRows = 2048;

// Monomial coefficients Q_n(x) = sum_k l[n][k] x^k for n <= n_max, and the
// moments mu_0 .. mu_{n_max} of dpsi from the coefficient recursion
//   mu_n = -(1 / l[n][n]) sum_{k<n} l[n][k] mu_k.
// Entries with n - k odd are zero and are stored as zero.
template <class Real>
class CoefficientTable {
public:
    double rho() const noexcept { return rho_; }
    int n_max() const noexcept { return n_max_; }

    const Real& coeff(int n, int k) const { return l_[index(n, k)]; }
    const Real& moment(int n) const { return mu_.at(static_cast<std::size_t>(n)); }
    const std::vector<Real>& moments() const noexcept { return mu_; }

    // sum_k l[n][k] x^k by Horner in Real.
    Real evaluate(int n, const Real& x) const {
        Real s = 0;
        for (int k = n; k >= 0; --k) s = s * x + coeff(n, k);
        return s;
    }

private:
    template <class R>
    friend CoefficientTable<R> build_coefficient_table(int, const QueueParameters&);

    static std::size_t index(int n, int k) {
        return static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2 +
               static_cast<std::size_t>(k);
    }

    double rho_ = 0.0;
    int n_max_ = 0;
    std::vector<Real> l_;
    std::vector<Real> mu_;
};

// l[n][k] = ((1+rho)/rho) l[n-1][k-1] 1{1<=k<=n} - ((n-1)/(n rho)) l[n-2][k] 1{0<=k<=n-2},
// l[0][0] = 1. Throws DomainError for n_max < 0, CapacityError above
// kMaxCoefficientRows.
template <class Real = Extended>
CoefficientTable<Real> build_coefficient_table(int n_max, const QueueParameters& params) {
    if (n_max < 0) throw DomainError("coefficient table needs n_max >= 0");
    if (n_max > kMaxCoefficientRows) {
        throw CapacityError("coefficient table limited to " + std::to_string(kMaxCoefficientRows) +
                            " rows, requested " + std::to_string(n_max));
    }
    CoefficientTable<Real> t;
    t.rho_ = params.rho();
    t.n_max_ = n_max;
    t.l_.assign(CoefficientTable<Real>::index(n_max + 1, 0), Real(0));

    const Real rho(params.rho());
    const Real up = (Real(1) + rho) / rho;
    t.l_[0] = 1;
    if (n_max >= 1) t.l_[CoefficientTable<Real>::index(1, 1)] = up;
    for (int n = 2; n <= n_max; ++n) {
        const Real down = Real(n - 1) / (Real(n) * rho);
        for (int k = n % 2; k <= n; k += 2) {
            Real v = 0;
            if (k >= 1) v = up * t.l_[CoefficientTable<Real>::index(n - 1, k - 1)];
            if (k <= n - 2) v -= down * t.l_[CoefficientTable<Real>::index(n - 2, k)];
            t.l_[CoefficientTable<Real>::index(n, k)] = v;
        }
    }

    t.mu_.assign(static_cast<std::size_t>(n_max) + 1, Real(0));
    t.mu_[0] = 1;
    for (int n = 2; n <= n_max; n += 2) {
        Real s = 0;
        for (int k = 0; k < n; k += 2) s += t.coeff(n, k) * t.mu_[static_cast<std::size_t>(k)];
        t.mu_[static_cast<std::size_t>(n)] = -s / t.coeff(n, n);
    }
    return t;
}

// Moments by quadrature: sum_i w_i x_i^n for n = 0 .. n_max.
std::vector<double> quadrature_moments(int n_max, const SpectralMeasure& measure);

enum class MomentMethod { recursion, quadrature };

// mu_0 .. mu_{n_max} by either method, rounded to double. The recursion path
// reads the moments stored in the table. Throws CapacityError when the table
// is too short.
template <class Real>
std::vector<double> moments(int n_max, MomentMethod method, const CoefficientTable<Real>& table,
                            const SpectralMeasure& measure) {
    if (method == MomentMethod::quadrature) return quadrature_moments(n_max, measure);
    if (n_max > table.n_max()) {
        throw CapacityError("coefficient table covers moments up to " + std::to_string(table.n_max()));
    }
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) out[static_cast<std::size_t>(n)] = static_cast<double>(table.moment(n));
    return out;
}

// Index of the first even n <= n_max with
//   |mu_rec - mu_quad| > rel_tol * max(|mu_quad|, floor),
// or -1 when all agree. floor guards moments far below double resolution.
template <class Real>
int first_moment_mismatch(const CoefficientTable<Real>& table, std::span<const double> quad,
                          int n_max, double rel_tol, double floor = 1e-290) {
    for (int n = 0; n <= n_max; n += 2) {
        const double q = quad[static_cast<std::size_t>(n)];
        const double r = static_cast<double>(table.moment(n));
        const double scale = std::max(std::abs(q), floor);
        if (!(std::abs(r - q) <= rel_tol * scale)) return n;
    }
    return -1;
}

struct VerifiedMoments {
    std::size_t rung = 0;  // index into kPrecisionLadder
    unsigned digits10 = 0;
    std::vector<double> values;
    double max_rel_diff = 0.0;  // against quadrature, over even n
};

// Recursion moments at the lowest ladder rung whose values agree with the
// quadrature moments to rel_tol for every even n <= n_max. Throws
// PrecisionEscalationError naming the first failing index at the top rung.
VerifiedMoments verified_moments(int n_max, const QueueParameters& params,
                                 const SpectralMeasure& measure, double rel_tol = 1e-10,
                                 std::size_t first_rung = 0);

}  // namespace psq

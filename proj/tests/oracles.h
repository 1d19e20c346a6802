#pragma once

// Reference computations used only by the tests. They share no code with the
// library: plain recurrences, dense matrices and truncated power series.

#include <cmath>
#include <cstddef>
#include <vector>

namespace psq::test {

// Q_n(x) by the three-term recurrence in long double.
inline long double q_poly(int n, long double x, long double rho) {
    long double prev = 0.0L;
    long double cur = 1.0L;
    for (int k = 0; k < n; ++k) {
        const long double next = ((k + 1) * (1 + rho) * x * cur - k * prev) / ((k + 1) * rho);
        prev = cur;
        cur = next;
    }
    return cur;
}

// Dense transient matrix of the embedded chain on states 0..M-1 (upward
// transition dropped at M-1).
struct DenseChain {
    int M;
    std::vector<double> a;       // row-major M x M
    std::vector<double> absorb;  // per state
};

inline DenseChain dense_chain(double rho, int M) {
    DenseChain c{M, std::vector<double>(static_cast<std::size_t>(M) * M, 0.0), std::vector<double>(M, 0.0)};
    for (int n = 0; n < M; ++n) {
        if (n + 1 < M) c.a[static_cast<std::size_t>(n) * M + n + 1] = rho / (1 + rho);
        if (n > 0) c.a[static_cast<std::size_t>(n) * M + n - 1] = n / ((n + 1) * (1 + rho));
        c.absorb[n] = 1.0 / ((n + 1) * (1 + rho));
    }
    return c;
}

// P(kappa = k, nu = m | n0) for k = 1..k_max, m = 0..M-1 by dense row-vector
// products; result[(k-1) * M + m].
inline std::vector<double> dense_joint(const DenseChain& c, int n0, int k_max) {
    const int M = c.M;
    std::vector<double> v(M, 0.0);
    v[n0] = 1.0;
    std::vector<double> out(static_cast<std::size_t>(k_max) * M, 0.0);
    for (int k = 1; k <= k_max; ++k) {
        for (int m = 0; m < M; ++m) out[static_cast<std::size_t>(k - 1) * M + m] = v[m] * c.absorb[m];
        std::vector<double> w(M, 0.0);
        for (int i = 0; i < M; ++i) {
            if (v[i] == 0.0) continue;
            for (int j = 0; j < M; ++j) w[j] += v[i] * c.a[static_cast<std::size_t>(i) * M + j];
        }
        v.swap(w);
    }
    return out;
}

// Truncated power series arithmetic, coefficients 0..N.
using Series = std::vector<double>;

inline Series series_mul(const Series& a, const Series& b) {
    Series c(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; i + j < a.size(); ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

// 1 / (1 - a), a[0] = 0.
inline Series series_geometric(const Series& a) {
    Series out(a.size(), 0.0);
    Series power(a.size(), 0.0);
    power[0] = 1.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (std::size_t i = 0; i < a.size(); ++i) out[i] += power[i];
        power = series_mul(power, a);
    }
    return out;
}

// Number served in an M/M/1 busy period, by fixed-point iteration of
// beta(z) = z / (1 + rho) * 1 / (1 - rho/(1+rho) beta(z)) on series.
inline Series busy_series(double rho, int N) {
    Series beta(static_cast<std::size_t>(N) + 1, 0.0);
    for (int it = 0; it <= N + 1; ++it) {
        Series scaled(beta.size());
        for (std::size_t i = 0; i < beta.size(); ++i) scaled[i] = rho / (1 + rho) * beta[i];
        const Series g = series_geometric(scaled);
        Series next(beta.size(), 0.0);
        for (std::size_t i = 1; i < beta.size(); ++i) next[i] = g[i - 1] / (1 + rho);
        beta = next;
    }
    return beta;
}

// Coefficients of B(z) = (1 - rho) beta / (1 - rho beta).
inline Series residual_busy_series(double rho, int N) {
    const Series beta = busy_series(rho, N);
    Series scaled(beta.size());
    for (std::size_t i = 0; i < beta.size(); ++i) scaled[i] = rho * beta[i];
    Series b = series_mul(beta, series_geometric(scaled));
    for (double& v : b) v *= 1 - rho;
    return b;
}

// Composite Gauss-Legendre (10 points) of f over [a, b] with n panels.
template <class F>
double integrate(F&& f, double a, double b, int n) {
    static const double x[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244, 0.8650633666889845,
                                0.9739065285171717};
    static const double w[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
                                0.0666713443086881};
    const double h = (b - a) / n;
    double s = 0.0;
    for (int p = 0; p < n; ++p) {
        const double c = a + (p + 0.5) * h;
        for (int i = 0; i < 5; ++i) {
            s += w[i] * (f(c - 0.5 * h * x[i]) + f(c + 0.5 * h * x[i]));
        }
    }
    return 0.5 * h * s;
}

}  // namespace psq::test

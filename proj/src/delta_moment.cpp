// Arrival-count pmf from the monomial coefficients and the moments of dpsi.
//
// With C(e, K) = sum_{m=e}^{K} rho^m l[m][m-e] and
//      M_n(p)  = sum_t l[n][t] mu_{p+t},
//   P(alpha = j) = ((1-rho)/(1+rho)) sum_{n<=N} rho^n sum_{e<=j+n} C(e, j+n) M_n(2j+n-e).
// Both inner sums cancel heavily, so everything up to the final rounding is
// carried in the extended type of the current precision rung.

#include "psq/analytic.h"
#include "psq/errors.h"
#include "psq/extended.h"
#include "psq/pollaczek.h"

#include <cmath>
#include <string>

namespace psq {

namespace {

template <class Real>
std::vector<double> arrival_sum(const QueueParameters& params, int j_max, int n_max) {
    const int k_top = j_max + n_max;
    const int p_top = 2 * j_max + n_max;
    const auto table = build_coefficient_table<Real>(2 * j_max + 2 * n_max, params);
    const Real rho(params.rho());

    std::vector<Real> rho_pow(static_cast<std::size_t>(k_top) + 1);
    rho_pow[0] = 1;
    for (int m = 1; m <= k_top; ++m) rho_pow[static_cast<std::size_t>(m)] = rho_pow[static_cast<std::size_t>(m - 1)] * rho;

    // c_rows[K][e], cumulative in K; l[k][k-e] vanishes for odd e.
    const auto width = static_cast<std::size_t>(k_top) + 1;
    std::vector<Real> c_rows(width * width, Real(0));
    for (int k = 0; k <= k_top; ++k) {
        const std::size_t row = static_cast<std::size_t>(k) * width;
        if (k > 0) {
            for (int e = 0; e < k; e += 2) c_rows[row + static_cast<std::size_t>(e)] = c_rows[row - width + static_cast<std::size_t>(e)];
        }
        for (int e = 0; e <= k; e += 2) {
            c_rows[row + static_cast<std::size_t>(e)] += rho_pow[static_cast<std::size_t>(k)] * table.coeff(k, k - e);
        }
    }

    // m_rows[n][p] for p = n mod 2.
    const auto p_width = static_cast<std::size_t>(p_top) + 1;
    std::vector<Real> m_rows(static_cast<std::size_t>(n_max + 1) * p_width, Real(0));
    for (int n = 0; n <= n_max; ++n) {
        for (int p = n % 2; p <= p_top; p += 2) {
            Real s = 0;
            for (int t = n % 2; t <= n; t += 2) s += table.coeff(n, t) * table.moment(p + t);
            m_rows[static_cast<std::size_t>(n) * p_width + static_cast<std::size_t>(p)] = s;
        }
    }

    const Real c = (Real(1) - rho) / (Real(1) + rho);
    std::vector<double> out(static_cast<std::size_t>(j_max) + 1);
    for (int j = 0; j <= j_max; ++j) {
        Real total = 0;
        for (int n = 0; n <= n_max; ++n) {
            const int k = j + n;
            const std::size_t c_row = static_cast<std::size_t>(k) * width;
            const std::size_t m_row = static_cast<std::size_t>(n) * p_width;
            Real inner = 0;
            for (int e = 0; e <= k; e += 2) {
                inner += c_rows[c_row + static_cast<std::size_t>(e)] *
                         m_rows[m_row + static_cast<std::size_t>(2 * j + n - e)];
            }
            total += rho_pow[static_cast<std::size_t>(n)] * inner;
        }
        out[static_cast<std::size_t>(j)] = static_cast<double>(c * total);
    }
    return out;
}

// First j where two evaluations differ by more than rel_tol relative, or -1.
int first_disagreement(const std::vector<double>& a, const std::vector<double>& b, double rel_tol) {
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double scale = std::max(std::abs(a[j]), 1e-300);
        if (!(std::abs(a[j] - b[j]) <= rel_tol * scale)) return static_cast<int>(j);
    }
    return -1;
}

constexpr double kRungAgreement = 1e-12;

}  // namespace

MomentPathResult delta_pmf_moments(const SpectralEngine& e, int j_max) {
    if (j_max < 0) throw DomainError("j_max must be >= 0");
    const OuterTruncation outer = outer_truncation(e.params(), e.trunc());
    const int rows = 2 * j_max + 2 * outer.n_max;
    if (rows > kMaxCoefficientRows) {
        throw CapacityError("moment path needs " + std::to_string(rows) + " coefficient rows");
    }
    // Start at the lowest rung whose moments pass the quadrature cross-check,
    // then climb until two consecutive rungs agree on every entry.
    const VerifiedMoments vm = verified_moments(rows, e.params(), e.measure());
    auto eval = [&](std::size_t rung) {
        return with_precision_rung(rung, [&]<class Real>() {
            return arrival_sum<Real>(e.params(), j_max, outer.n_max);
        });
    };
    std::vector<double> lower = eval(vm.rung);
    int failing = 0;
    for (std::size_t rung = vm.rung + 1; rung < kPrecisionLadder.size(); ++rung) {
        std::vector<double> upper = eval(rung);
        failing = first_disagreement(lower, upper, kRungAgreement);
        if (failing < 0) {
            double tail = 1.0;
            for (double p : upper) tail -= p;
            return MomentPathResult{Pmf(0, std::move(upper), std::max(0.0, tail)), outer,
                                    kPrecisionLadder[rung]};
        }
        lower = std::move(upper);
    }
    throw PrecisionEscalationError("moment-path probabilities unstable at j = " + std::to_string(failing) +
                                       " up to " + std::to_string(kPrecisionLadder.back()) + " digits",
                                   failing);
}

}  // namespace psq

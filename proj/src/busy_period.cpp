#include "psq/busy_period.h"

#include "psq/errors.h"
#include "psq/spectral_measure.h"

#include <cmath>
#include <string>
#include <vector>

namespace psq {

namespace {

void require_below_cut(const BusyPeriodModel& m, double z) {
    if (!(z <= m.params.z0())) {
        throw SingularityError("z = " + describe(z) + " lies on the branch cut beyond z0 = " +
                               describe(m.params.z0()));
    }
}

double radicand(const BusyPeriodModel& m, double z) {
    const double rho = m.params.rho();
    return std::max(0.0, 1.0 - 4.0 * rho * z / ((1.0 + rho) * (1.0 + rho)));
}

// Streams t_k = C(2k, k) u^k / (k + 1) for k = 0, 1, ... in log space.
class CatalanTerms {
public:
    explicit CatalanTerms(const QueueParameters& p)
        : log_u_(std::log(p.rho()) - 2.0 * std::log1p(p.rho())) {}

    long long index() const noexcept { return k_; }
    double value() const noexcept { return std::exp(log_t_); }
    void advance() noexcept {
        const double k = static_cast<double>(k_);
        // t_{k+1} / t_k = 2 (2k + 1) u / (k + 2)
        log_t_ += std::log(2.0 * (2.0 * k + 1.0) / (k + 2.0)) + log_u_;
        ++k_;
    }

private:
    double log_u_;
    double log_t_ = 0.0;
    long long k_ = 0;
};

// sum_{k > k0} t_k * weight(k), where the stream sits at k0 + 1 on entry.
// Stops once t_{k+1} w_{k+1} / (1 - 4u) <= tol * partial; weight must be
// nondecreasing and grow at most like log k.
template <class Weight>
double series_tail(CatalanTerms& t, const BusyPeriodModel& m, Weight&& weight) {
    const double rho = m.params.rho();
    const double ratio_bound = 4.0 * rho / ((1.0 + rho) * (1.0 + rho));
    double sum = 0.0;
    double comp = 0.0;
    for (;;) {
        const double term = t.value() * weight(t.index());
        // Kahan summation: the tail may need millions of terms near rho = 1.
        const double y = term - comp;
        const double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        t.advance();
        const double next = t.value() * weight(t.index());
        if (next / (1.0 - ratio_bound) <= m.series_tol * sum) break;
        if (t.index() >= m.k_cap) {
            throw TruncationError("busy-period series not converged at k_cap = " + std::to_string(m.k_cap),
                                  next / (1.0 - ratio_bound) / sum);
        }
    }
    return sum;
}

}  // namespace

BusyPeriodModel make_busy_period_model(const QueueParameters& params, double series_tol, long long k_cap) {
    if (!(series_tol > 0.0)) throw DomainError("series_tol must be > 0");
    if (k_cap < 1) throw DomainError("k_cap must be >= 1");
    return BusyPeriodModel{params, series_tol, k_cap};
}

double beta_gen(const BusyPeriodModel& m, double z) {
    require_below_cut(m, z);
    const double rho = m.params.rho();
    return 2.0 * z / ((1.0 + rho) * (1.0 + std::sqrt(radicand(m, z))));
}

double B_gen(const BusyPeriodModel& m, double z) {
    const double rho = m.params.rho();
    const double beta = beta_gen(m, z);
    const double denom = 1.0 - rho * beta;
    if (!(denom > 0.0)) throw SingularityError("pole of B(z): rho beta(z) = 1");
    return (1.0 - rho) * beta / denom;
}

double B_gen_closed_form(const BusyPeriodModel& m, double z) {
    require_below_cut(m, z);
    if (z == 1.0) return 1.0;
    const double rho = m.params.rho();
    const double bracket = 1.0 - 2.0 * rho * z / (1.0 + rho) - std::sqrt(radicand(m, z));
    return (1.0 - rho) * (1.0 + rho) / (2.0 * rho * rho * (z - 1.0)) * bracket;
}

Pmf b_pmf(const BusyPeriodModel& m, int l_max) {
    if (l_max < 1) throw DomainError("l_max must be >= 1");
    const double rho = m.params.rho();
    const double c = (1.0 - rho) / (rho * (1.0 + rho));

    std::vector<double> terms(static_cast<std::size_t>(l_max) + 1);
    CatalanTerms t(m.params);
    for (int k = 0; k <= l_max; ++k) {
        terms[static_cast<std::size_t>(k)] = t.value();
        t.advance();
    }
    double tail = series_tail(t, m, [](long long) { return 1.0; });

    // P(b = l) = c * (sum_{k=l}^{l_max} t_k + tail), accumulated backwards.
    std::vector<double> probs(static_cast<std::size_t>(l_max) + 1, 0.0);
    double total = 0.0;
    for (int l = l_max; l >= 1; --l) {
        tail += terms[static_cast<std::size_t>(l)];
        probs[static_cast<std::size_t>(l)] = c * tail;
        total += probs[static_cast<std::size_t>(l)];
    }
    return Pmf(0, std::move(probs), std::max(0.0, 1.0 - total));
}

Pmf btilde_pmf(const BusyPeriodModel& m, int j_max) {
    if (j_max < 0) throw DomainError("j_max must be >= 0");
    const double rho = m.params.rho();
    const double c = (1.0 - rho) / (rho * (1.0 + rho));
    const Pmf b = b_pmf(m, j_max + 1);

    // P(b~ = j_max) = c sum_{k > j_max} t_k (H_k - H_{j_max}).
    CatalanTerms t(m.params);
    while (t.index() <= j_max) t.advance();
    double harmonic_gap = 0.0;
    long long gap_index = j_max;
    const double top = c * series_tail(t, m, [&](long long k) {
        while (gap_index < k) harmonic_gap += 1.0 / static_cast<double>(++gap_index);
        return harmonic_gap;
    });

    std::vector<double> probs(static_cast<std::size_t>(j_max) + 1);
    probs[static_cast<std::size_t>(j_max)] = top;
    double total = top;
    for (int j = j_max - 1; j >= 0; --j) {
        probs[static_cast<std::size_t>(j)] =
            probs[static_cast<std::size_t>(j + 1)] + b.at(j + 1) / static_cast<double>(j + 1);
        total += probs[static_cast<std::size_t>(j)];
    }
    return Pmf(0, std::move(probs), std::max(0.0, 1.0 - total));
}

double btilde_gen(const BusyPeriodModel& m, double z, int quad_points) {
    if (!(z >= 0.0 && z < 1.0)) throw DomainError("btilde_gen needs 0 <= z < 1");
    if (quad_points < 2) throw DomainError("btilde_gen needs quad_points >= 2");
    const GaussRule rule = gauss_legendre(quad_points);
    auto integrand = [&](double t) {
        if (t == 0.0) return 0.0;  // measure-zero; the finite limit is never sampled
        return (B_gen(m, t) - B_gen(m, z * t)) / (t * (1.0 - z));
    };
    // Panels [1 - 2^-k, 1 - 2^-(k+1)], then the last sliver to 1.
    constexpr int kPanels = 40;
    double total = 0.0;
    double lo = 0.0;
    for (int k = 0; k <= kPanels; ++k) {
        const double hi = k == kPanels ? 1.0 : 1.0 - std::ldexp(1.0, -(k + 1));
        const double mid = 0.5 * (lo + hi);
        const double rad = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            total += rad * rule.weights[i] * integrand(mid + rad * rule.nodes[i]);
        }
        lo = hi;
    }
    return total;
}

}  // namespace psq

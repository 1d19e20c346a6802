#include "psq/markov_oracle.h"

#include "psq/errors.h"
#include "psq/kernels.h"

#include <cmath>
#include <numeric>
#include <string>

namespace psq {

namespace {

void require_start(const TruncatedChain& chain, int n0) {
    if (n0 < 0 || 2 * n0 > chain.cap()) {
        throw DomainError("initial state " + std::to_string(n0) + " outside [0, cap/2] for cap " +
                          std::to_string(chain.cap()));
    }
}

// Row vector over the transient states; advance() applies A once and
// accounts for the mass pushed past the cap.
class Walker {
public:
    Walker(const TruncatedChain& chain, int n0)
        : chain_(chain), v_(static_cast<std::size_t>(chain.cap()) + 1, 0.0), next_(v_.size(), 0.0) {
        v_[static_cast<std::size_t>(n0)] = 1.0;
    }

    std::span<const double> state() const noexcept { return v_; }
    double leak() const noexcept { return leak_; }
    double mass() const noexcept { return std::accumulate(v_.begin(), v_.end(), 0.0); }

    void advance() {
        leak_ += v_.back() * chain_.up();
        kernels::tridiag_step(v_, chain_.down(), chain_.up(), next_);
        v_.swap(next_);
    }

private:
    const TruncatedChain& chain_;
    std::vector<double> v_;
    std::vector<double> next_;
    double leak_ = 0.0;
};

void check_leak(double leak, const OracleTolerances& tol, int cap) {
    if (leak > tol.leak) {
        throw EnlargeStateCapError("chain leaked " + std::to_string(leak) + " past cap " +
                                       std::to_string(cap),
                                   leak);
    }
}

// Visits (k, m, P(kappa = k, nu = m)) until the unabsorbed mass is below
// tol.residual; returns (residual, leak).
template <class Visit>
std::pair<double, double> run_to_absorption(const TruncatedChain& chain, int n0,
                                            const OracleTolerances& tol, Visit&& visit) {
    Walker w(chain, n0);
    const auto absorb = chain.absorb();
    for (int k = 1;; ++k) {
        const auto v = w.state();
        for (std::size_t m = 0; m < v.size(); ++m) {
            if (v[m] != 0.0) visit(k, static_cast<int>(m), v[m] * absorb[m]);
        }
        w.advance();
        check_leak(w.leak(), tol, chain.cap());
        const double residual = w.mass();
        if (residual < tol.residual) return {residual, w.leak()};
        if (k >= tol.max_steps) {
            throw TruncationError("chain not absorbed after " + std::to_string(k) + " events", residual);
        }
    }
}

}  // namespace

TruncatedChain build_chain(const QueueParameters& params, int M) {
    if (M < 1) throw DomainError("state cap must be >= 1");
    TruncatedChain c(params);
    const double rho = params.rho();
    c.cap_ = M;
    c.up_ = rho / (1.0 + rho);
    c.down_.resize(static_cast<std::size_t>(M) + 1);
    c.absorb_.resize(static_cast<std::size_t>(M) + 1);
    for (int n = 0; n <= M; ++n) {
        const double nn = static_cast<double>(n);
        c.down_[static_cast<std::size_t>(n)] = nn / ((nn + 1.0) * (1.0 + rho));
        c.absorb_[static_cast<std::size_t>(n)] = 1.0 / ((nn + 1.0) * (1.0 + rho));
    }
    return c;
}

int default_state_cap(const QueueParameters& params) {
    int M = 16;
    while (static_cast<double>(M) * std::log(params.rho()) >= std::log(1e-14)) M *= 2;
    return M;
}

double JointDistribution::at(int k, int m) const noexcept {
    if (k < 1 || k > k_max || m < 0 || m > m_max) return 0.0;
    return joint[static_cast<std::size_t>(k - 1) * static_cast<std::size_t>(m_max + 1) +
                 static_cast<std::size_t>(m)];
}

JointDistribution oracle_joint(const TruncatedChain& chain, int n0, int k_max, int m_max,
                               const OracleTolerances& tol) {
    require_start(chain, n0);
    if (k_max < 1) throw DomainError("k_max must be >= 1");
    if (m_max < 0) m_max = chain.cap();
    JointDistribution d;
    d.n0 = n0;
    d.k_max = k_max;
    d.m_max = m_max;
    d.joint.assign(static_cast<std::size_t>(k_max) * static_cast<std::size_t>(m_max + 1), 0.0);
    d.kappa.assign(static_cast<std::size_t>(k_max), 0.0);
    d.nu.assign(static_cast<std::size_t>(chain.cap()) + 1, 0.0);

    Walker w(chain, n0);
    const auto absorb = chain.absorb();
    for (int k = 1; k <= k_max; ++k) {
        const auto v = w.state();
        double kappa_k = 0.0;
        for (std::size_t m = 0; m < v.size(); ++m) {
            const double p = v[m] * absorb[m];
            kappa_k += p;
            d.nu[m] += p;
            if (static_cast<int>(m) <= m_max) {
                d.joint[static_cast<std::size_t>(k - 1) * static_cast<std::size_t>(m_max + 1) + m] = p;
            }
        }
        d.kappa[static_cast<std::size_t>(k - 1)] = kappa_k;
        w.advance();
        check_leak(w.leak(), tol, chain.cap());
    }
    d.residual = w.mass();
    d.leak = w.leak();
    return d;
}

Pmf oracle_nu(const TruncatedChain& chain, int n0, const OracleTolerances& tol) {
    require_start(chain, n0);
    std::vector<double> nu(static_cast<std::size_t>(chain.cap()) + 1, 0.0);
    const auto [residual, leak] =
        run_to_absorption(chain, n0, tol, [&](int, int m, double p) { nu[static_cast<std::size_t>(m)] += p; });
    return Pmf(0, std::move(nu), residual + leak);
}

Pmf oracle_kappa(const TruncatedChain& chain, int n0, const OracleTolerances& tol) {
    require_start(chain, n0);
    std::vector<double> kappa;
    const auto [residual, leak] = run_to_absorption(chain, n0, tol, [&](int k, int, double p) {
        if (kappa.size() < static_cast<std::size_t>(k)) kappa.resize(static_cast<std::size_t>(k), 0.0);
        kappa[static_cast<std::size_t>(k - 1)] += p;
    });
    return Pmf(1, std::move(kappa), residual + leak);
}

std::vector<double> oracle_nu_resolvent(const TruncatedChain& chain, int n0) {
    require_start(chain, n0);
    // (I - A)^T y^T = e_{n0}: row i has -up at column i-1, 1 on the diagonal
    // and -down[i+1] at column i+1.
    const std::size_t n = static_cast<std::size_t>(chain.cap()) + 1;
    const auto down = chain.down();
    const double up = chain.up();
    std::vector<double> c(n, 0.0);
    std::vector<double> d(n, 0.0);
    d[static_cast<std::size_t>(n0)] = 1.0;
    // Forward sweep.
    double denom = 1.0;
    c[0] = n > 1 ? -down[1] / denom : 0.0;
    d[0] = d[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = 1.0 - (-up) * c[i - 1];
        c[i] = i + 1 < n ? -down[i + 1] / denom : 0.0;
        d[i] = (d[i] - (-up) * d[i - 1]) / denom;
    }
    std::vector<double> y(n);
    y[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) y[i] = d[i] - c[i] * y[i + 1];
    const auto absorb = chain.absorb();
    for (std::size_t i = 0; i < n; ++i) y[i] *= absorb[i];
    return y;
}

AlphaDelta oracle_alpha_delta(const TruncatedChain& chain, int j_max, const TruncationConfig& trunc,
                              const OracleTolerances& tol) {
    if (j_max < 0) throw DomainError("j_max must be >= 0");
    trunc.validate();
    const QueueParameters& p = chain.params();
    const double log_rho = std::log(p.rho());
    int n0_max = 0;
    while (static_cast<double>(n0_max + 1) * log_rho > std::log(trunc.epsilon)) ++n0_max;
    if (n0_max > trunc.n_cap) {
        throw TruncationError("initial-state mixture needs n0 up to " + std::to_string(n0_max) +
                                  " beyond n_cap " + std::to_string(trunc.n_cap),
                              std::pow(p.rho(), trunc.n_cap + 1));
    }
    if (2 * n0_max > chain.cap()) {
        throw EnlargeStateCapError("initial-state mixture needs cap >= " + std::to_string(2 * n0_max),
                                   std::pow(p.rho(), chain.cap() / 2 + 1));
    }

    const auto size = static_cast<std::size_t>(j_max) + 1;
    std::vector<double> alpha(size, 0.0);
    std::vector<double> delta(size, 0.0);
    for (int n0 = 0; n0 <= n0_max; ++n0) {
        const double weight = p.stationary_weight(n0);
        run_to_absorption(chain, n0, tol, [&](int k, int m, double prob) {
            const ArrivalsDepartures ad = alpha_delta_from_path(n0, k, m);
            if (ad.alpha <= j_max) alpha[static_cast<std::size_t>(ad.alpha)] += weight * prob;
            if (ad.delta <= j_max) delta[static_cast<std::size_t>(ad.delta)] += weight * prob;
        });
    }
    const double a_tail = std::max(0.0, 1.0 - std::accumulate(alpha.begin(), alpha.end(), 0.0));
    const double d_tail = std::max(0.0, 1.0 - std::accumulate(delta.begin(), delta.end(), 0.0));
    return AlphaDelta{Pmf(0, std::move(alpha), a_tail), Pmf(0, std::move(delta), d_tail), n0_max};
}

std::vector<double> erlang_tails(int k_max, double rate, double y) {
    if (y < 0.0) throw DomainError("sojourn threshold must be >= 0");
    std::vector<double> tails(static_cast<std::size_t>(std::max(k_max, 0)));
    if (y == 0.0) {
        std::fill(tails.begin(), tails.end(), 1.0);
        return tails;
    }
    const double ly = rate * y;
    const double log_ly = std::log(ly);
    double log_term = -ly;  // log of e^{-ly} ly^i / i!
    double cumulative = 0.0;
    for (int k = 1; k <= k_max; ++k) {
        cumulative += std::exp(log_term);
        tails[static_cast<std::size_t>(k - 1)] = std::min(1.0, cumulative);
        log_term += log_ly - std::log(static_cast<double>(k));
    }
    return tails;
}

double oracle_sojourn_tail(const TruncatedChain& chain, int n0, double y, const OracleTolerances& tol) {
    if (y < 0.0) throw DomainError("sojourn threshold must be >= 0");
    const Pmf kappa = oracle_kappa(chain, n0, tol);
    const std::vector<double> tails =
        erlang_tails(kappa.max_index(), 1.0 + chain.params().rho(), y);
    double s = 0.0;
    for (int k = 1; k <= kappa.max_index(); ++k) s += kappa.at(k) * tails[static_cast<std::size_t>(k - 1)];
    return s;
}

}  // namespace psq

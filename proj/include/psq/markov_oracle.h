#pragma once

// Brute-force reference: the embedded chain of the number of other customers
// while the tagged customer is present, truncated at a state cap M, with
// distributions obtained by pushing a row vector through the tridiagonal
// sub-stochastic matrix. Uses no spectral machinery.

#include "psq/errors.h"
#include "psq/model.h"

#include <span>
#include <vector>

namespace psq {

struct OracleTolerances {
    double residual = 1e-15;  // stop once unabsorbed mass drops below this
    double leak = 1e-12;      // mass allowed to escape past the cap
    int max_steps = 2'000'000;
};

class TruncatedChain {
public:
    const QueueParameters& params() const noexcept { return params_; }
    int cap() const noexcept { return cap_; }

    // a_{n,n+1} = rho / (1 + rho) for n < cap; dropped (leaked) at n = cap.
    double up() const noexcept { return up_; }
    // a_{n,n-1} = n / ((n+1)(1+rho)); index n in 0..cap.
    std::span<const double> down() const noexcept { return down_; }
    // a_{n,-1} = 1 / ((n+1)(1+rho)); index n in 0..cap.
    std::span<const double> absorb() const noexcept { return absorb_; }

private:
    friend TruncatedChain build_chain(const QueueParameters&, int);
    explicit TruncatedChain(const QueueParameters& p) : params_(p) {}

    QueueParameters params_;
    int cap_ = 0;
    double up_ = 0.0;
    std::vector<double> down_;
    std::vector<double> absorb_;
};

// Throws DomainError for M < 1.
TruncatedChain build_chain(const QueueParameters& params, int M);

// Smallest power of two M with rho^M < 1e-14 (at least 16).
int default_state_cap(const QueueParameters& params);

// P(kappa = k, nu = m | N_0 = n0) for 1 <= k <= k_max, 0 <= m <= m_max, and
// marginals over every m <= cap.
struct JointDistribution {
    int n0 = 0;
    int k_max = 0;
    int m_max = 0;
    std::vector<double> joint;  // (k - 1) * (m_max + 1) + m
    std::vector<double> kappa;  // k - 1, summed over all m
    std::vector<double> nu;     // m in 0..cap, summed over k <= k_max
    double residual = 0.0;      // unabsorbed after k_max events
    double leak = 0.0;          // escaped past the cap

    double at(int k, int m) const noexcept;
};

// Throws DomainError for n0 outside [0, cap/2] or k_max < 1, and
// EnlargeStateCapError when the leak exceeds tol.leak.
JointDistribution oracle_joint(const TruncatedChain& chain, int n0, int k_max, int m_max,
                               const OracleTolerances& tol = {});

// Marginals iterated to absorption (residual below tol.residual). tail_mass
// carries residual + leak. Same errors as oracle_joint, plus
// TruncationError if tol.max_steps is exhausted.
Pmf oracle_nu(const TruncatedChain& chain, int n0, const OracleTolerances& tol = {});
Pmf oracle_kappa(const TruncatedChain& chain, int n0, const OracleTolerances& tol = {});

// nu from the resolvent: y (I - A) = e_{n0}, P(nu = m) = y_m absorb_m, solved
// as a tridiagonal system (Thomas algorithm).
std::vector<double> oracle_nu_resolvent(const TruncatedChain& chain, int n0);

struct AlphaDelta {
    Pmf alpha;
    Pmf delta;
    int n0_max = 0;  // last initial state mixed in
};

// Stationary mixture over n0 with weights (1 - rho) rho^{n0}, n0 up to the
// first N with rho^{N+1} <= trunc.epsilon, of the pushforward of the joint
// law through alpha_delta_from_path. Throws TruncationError when N exceeds
// trunc.n_cap and EnlargeStateCapError when 2N exceeds the cap.
// tail_mass = 1 - sum of the table.
AlphaDelta oracle_alpha_delta(const TruncatedChain& chain, int j_max, const TruncationConfig& trunc,
                              const OracleTolerances& tol = {});

// sum_k P(kappa = k | n0) P(Erlang(k, 1 + rho) > y).
// Throws DomainError for y < 0.
double oracle_sojourn_tail(const TruncatedChain& chain, int n0, double y,
                           const OracleTolerances& tol = {});

// P(Erlang(k, rate) > y) = sum_{i<k} e^{-rate y} (rate y)^i / i!, for k = 1..k_max.
std::vector<double> erlang_tails(int k_max, double rate, double y);

// Runs f(chain) on the default cap, doubling the cap (up to 2^16) while f
// throws EnlargeStateCapError.
template <class F>
decltype(auto) with_auto_cap(const QueueParameters& params, F&& f) {
    for (int M = default_state_cap(params);; M *= 2) {
        try {
            return f(build_chain(params, M));
        } catch (const EnlargeStateCapError&) {
            if (M >= (1 << 16)) throw;
        }
    }
}

}  // namespace psq

#pragma once

// Monte Carlo of the tagged customer on the embedded jump chain: with n other
// customers present the next event is an arrival w.p. rho/(1+rho), otherwise
// a departure of a customer chosen uniformly among the n+1 present. Holding
// times are exponential with rate 1+rho.

#include "psq/model.h"

#include <cmath>
#include <cstdint>
#include <vector>

namespace psq {

struct TaggedRecord {
    int n0 = 0;
    int alpha = 0;
    int delta = 0;
    int kappa = 0;
    int nu = 0;
    double sojourn = 0.0;
};

// kappa = alpha + delta + 1, nu = n0 + alpha - delta, sojourn > 0.
bool satisfies_identities(const TaggedRecord& r) noexcept;

// SplitMix64; one independent stream per (seed, replication index) so that
// results do not depend on how replications are scheduled.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;
    std::uint64_t next() noexcept;
    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    // Uniform on (0, 1].
    double uniform_open_left() noexcept { return 1.0 - uniform(); }

private:
    std::uint64_t state_;
};

enum class Event { arrival, departure_other, departure_tagged };

// Inverse-CDF sampler of the stationary count (1 - rho) rho^n found by an
// arrival, truncated where rho^n < 1e-15; the residual mass sits on the last
// index.
class InitialStateSampler {
public:
    explicit InitialStateSampler(const QueueParameters& params);
    int sample(double u) const noexcept;
    int max_state() const noexcept { return static_cast<int>(cdf_.size()) - 1; }

private:
    std::vector<double> cdf_;
};

// Randomness for one replication.
class RandomEventSource {
public:
    RandomEventSource(const QueueParameters& params, const InitialStateSampler& n0, std::uint64_t seed,
                      std::uint64_t replication) noexcept
        : params_(params), n0_(n0), rng_(seed, replication) {}

    int initial_state() noexcept { return n0_.sample(rng_.uniform()); }
    Event next_event(int n) noexcept {
        const double rho = params_.rho();
        if (rng_.uniform() < rho / (1.0 + rho)) return Event::arrival;
        return rng_.uniform() * static_cast<double>(n + 1) < 1.0 ? Event::departure_tagged
                                                                 : Event::departure_other;
    }
    double holding_time() noexcept { return -std::log(rng_.uniform_open_left()) / (1.0 + params_.rho()); }

private:
    const QueueParameters& params_;
    const InitialStateSampler& n0_;
    CounterRng rng_;
};

// Source: initial_state(), next_event(n), holding_time(). Scripted sources
// drive the chain deterministically in tests.
template <class Source>
TaggedRecord simulate_tagged(Source& src) {
    TaggedRecord r;
    r.n0 = src.initial_state();
    int n = r.n0;
    for (;;) {
        r.sojourn += src.holding_time();
        ++r.kappa;
        const Event ev = src.next_event(n);
        if (ev == Event::departure_tagged) break;
        if (ev == Event::arrival) {
            ++r.alpha;
            ++n;
        } else {
            ++r.delta;
            --n;
        }
    }
    r.nu = n;
    return r;
}

TaggedRecord simulate_tagged(const QueueParameters& params, std::uint64_t seed, std::uint64_t replication);

struct PmfEstimate {
    std::vector<std::uint64_t> counts;
    std::vector<double> p;
    std::vector<double> se;  // sqrt(p (1 - p) / R)
};

struct EstimateSet {
    std::uint64_t replications = 0;
    std::uint64_t seed = 0;
    PmfEstimate alpha;
    PmfEstimate delta;
    PmfEstimate nu;
    PmfEstimate kappa;  // index k - 1
    double sojourn_mean = 0.0;
    double sojourn_variance = 0.0;
    double sojourn_se = 0.0;
    double sojourn_ci_low = 0.0;   // 95% normal interval
    double sojourn_ci_high = 0.0;
    std::uint64_t identity_violations = 0;
    // alpha from even-numbered and delta from odd-numbered replications:
    // independent samples for a two-sample comparison.
    std::vector<std::uint64_t> alpha_even;
    std::vector<std::uint64_t> delta_odd;
};

// Replications run in fixed chunks combined in chunk order, so the result is
// bit-identical for any worker count. workers = 0 picks the hardware count.
// Throws DomainError for replications < 1.
EstimateSet estimate(const QueueParameters& params, std::uint64_t replications, std::uint64_t seed,
                     unsigned workers = 1);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    int bins = 0;
};

// Goodness of fit of counts against probs; bins from the right are pooled
// into a tail bin (the complement of the listed probabilities) until every
// expected count is at least min_expected. Throws DomainError when fewer
// than two bins remain.
ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& counts, const std::vector<double>& probs,
                               double min_expected = 5.0);

// Homogeneity of two count vectors; bins pooled from the right until both
// expected counts are at least min_expected.
ChiSquareResult chi_square_two_sample(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                                      double min_expected = 5.0);

}  // namespace psq

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace psq {

// Load of an M/M/1 processor-sharing queue (arrival rate rho, unit service
// rate) together with the constants every other module derives from it.
// Construct through validate_params().
class QueueParameters {
public:
    double rho() const noexcept { return rho_; }
    double sqrt_rho() const noexcept { return sqrt_rho_; }
    // 2 sqrt(rho) / (1 + rho): right end of the spectrum of the transient
    // sub-matrix, and the scale between x and cos(theta).
    double support_bound() const noexcept { return support_bound_; }
    // (1 + rho)^2 / (4 rho): algebraic singularity of the busy-period
    // generating function.
    double z0() const noexcept { return z0_; }
    // log(4 rho / (1 + rho)^2) = -log(z0), common exponential decay rate of
    // the departure count and the busy-period rank.
    double decay_rate() const noexcept { return decay_rate_; }

    // Stationary number of customers found by an arrival: (1 - rho) rho^n.
    double stationary_weight(int n) const;

private:
    friend QueueParameters validate_params(double rho);
    explicit QueueParameters(double rho);

    double rho_;
    double sqrt_rho_;
    double support_bound_;
    double z0_;
    double decay_rate_;
};

// Throws DomainError unless 0 < rho < 1 and rho is finite.
QueueParameters validate_params(double rho);

struct TruncationConfig {
    double epsilon = 1e-6;      // target tail mass of the outer summation
    int n_cap = 200;            // hard cap on the outer summation index
    double series_tol = 1e-14;  // relative tolerance for infinite series

    // Throws DomainError on a non-positive field.
    void validate() const;
};

// A finite probability table on the integers offset .. offset+size()-1 with
// the unresolved probability mass kept explicitly instead of renormalizing.
class Pmf {
public:
    Pmf() = default;
    // Entries must lie in [-1e-12, 1 + 1e-12]; round-off negatives are
    // clamped to zero. tail_mass must be >= 0 (tiny negatives clamped).
    Pmf(int offset, std::vector<double> probs, double tail_mass);

    int offset() const noexcept { return offset_; }
    std::size_t size() const noexcept { return probs_.size(); }
    int max_index() const noexcept { return offset_ + static_cast<int>(probs_.size()) - 1; }
    std::span<const double> probs() const noexcept { return probs_; }
    double tail_mass() const noexcept { return tail_mass_; }

    // Probability at index j, zero outside the stored range.
    double at(int j) const noexcept;
    double total() const noexcept;

    // True when sum + tail_mass lies within tol of one.
    bool is_normalized(double tol) const noexcept;

private:
    int offset_ = 0;
    std::vector<double> probs_;
    double tail_mass_ = 0.0;
};

struct MeanEstimate {
    double mean = 0.0;
    // tail_mass * (max stored index + 1): not a rigorous bound on the missed
    // contribution, only a flag that the tail is unresolved.
    double unresolved_tail = 0.0;
};

MeanEstimate pmf_mean(const Pmf& p);

struct ArrivalsDepartures {
    int alpha = 0;
    int delta = 0;
    friend bool operator==(const ArrivalsDepartures&, const ArrivalsDepartures&) = default;
};

// Arrivals and departures seen by a tagged customer that found n0 others,
// left after kappa events and left nu customers behind:
//   alpha + delta = kappa - 1,  alpha - delta = nu - n0.
// Throws InconsistentPathError on a parity or sign violation.
ArrivalsDepartures alpha_delta_from_path(int n0, int kappa, int nu);

}  // namespace psq

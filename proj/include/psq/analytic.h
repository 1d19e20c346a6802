#pragma once

// Exact distributions of the tagged customer through the spectral
// representation A = integral of x against dpsi. Every probability is an
// integral of polynomials in x against dpsi, evaluated on the nodes of a
// SpectralMeasure where P_n(cos theta; 1, 0) is cached per node.
//
// Notation: s = sqrt(rho), Q_n = s^{-n} P_n, and
//   P(theta, s) = Q(x; rho) = sum_n rho^n Q_n(x).

#include "psq/model.h"
#include "psq/spectral_measure.h"

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace psq {

// How the sojourn-tail integral is read. The candidate forms differ in the
// factor multiplying P_n e^{phi cot theta} D^{-3/2} e^{-D y},
// D = 1 + rho - 2 s cos theta:
//   literal_density   sin theta, integrated against the dpsi(theta) density
//   literal_dtheta    sin theta, integrated against plain d theta
//   measure           1, integrated against the dpsi(theta) density
// The engine adopts the first one whose n = 0, y = 0 value is 1.
enum class SojournReading { literal_density, literal_dtheta, measure };
inline constexpr std::array<SojournReading, 3> kSojournReadings{
    SojournReading::literal_density, SojournReading::literal_dtheta, SojournReading::measure};
std::string_view reading_name(SojournReading r) noexcept;

struct EngineOptions {
    TruncationConfig trunc;
    int panels = 64;
    int order = 20;
    // Highest polynomial degree cached on the nodes; defaults to n_cap + 200.
    int capacity = -1;
};

class SpectralEngine {
public:
    const QueueParameters& params() const noexcept { return params_; }
    const SpectralMeasure& measure() const noexcept { return measure_; }
    const TruncationConfig& trunc() const noexcept { return trunc_; }
    int capacity() const noexcept { return capacity_; }

    // P_n(cos theta_i; 1, 0) over the nodes. Throws CapacityError for n > capacity().
    std::span<const double> pollaczek(int n) const;
    // P(theta_i, sqrt(rho)) over the nodes.
    std::span<const double> generating() const noexcept { return generating_; }
    // dpsi weights divided by 1 - x_i.
    std::span<const double> resolvent_weights() const noexcept { return resolvent_weights_; }

    SojournReading sojourn_reading() const noexcept { return reading_; }
    // n = 0, y = 0 value of each candidate reading, in kSojournReadings order.
    const std::array<double, 3>& reading_normalizations() const noexcept { return reading_norms_; }
    // Per-node factor of the adopted reading (includes the quadrature weight).
    std::span<const double> sojourn_weights() const noexcept { return sojourn_weights_; }
    std::span<const double> decay() const noexcept { return decay_; }

private:
    friend SpectralEngine make_engine(const QueueParameters&, const EngineOptions&);
    SpectralEngine(const QueueParameters& p, SpectralMeasure m) : params_(p), measure_(std::move(m)) {}

    QueueParameters params_;
    SpectralMeasure measure_;
    TruncationConfig trunc_;
    int capacity_ = 0;
    std::vector<double> poly_;  // (capacity + 1) x nodes
    std::vector<double> generating_;
    std::vector<double> resolvent_weights_;
    SojournReading reading_ = SojournReading::measure;
    std::array<double, 3> reading_norms_{};
    std::vector<double> sojourn_weights_;
    std::vector<double> decay_;
};

// Throws DomainError on invalid options and QuadratureDiagnosticError when
// no sojourn reading normalizes to within 1e-8.
SpectralEngine make_engine(const QueueParameters& params, const EngineOptions& options = {});

// P(nu = m | N_0 = n) = (rho^m / (1 + rho)) integral Q_m Q_n / (1 - x) dpsi
double nu_given_n(const SpectralEngine& e, int n, int m);
// P(kappa = k | N_0 = n) = (1 / (1 + rho)) integral x^{k-1} Q(x; rho) Q_n dpsi
double kappa_given_n(const SpectralEngine& e, int n, int k);
// P(kappa = k, nu = m | N_0 = n) = (rho^m / (1 + rho)) integral x^{k-1} Q_m Q_n dpsi
double joint_given_n(const SpectralEngine& e, int n, int k, int m);

// Conditional tables over m = 0..m_max (resp. k = 1..k_max); same integrals,
// one pass over the nodes.
std::vector<double> nu_table_given_n(const SpectralEngine& e, int n, int m_max);
std::vector<double> kappa_table_given_n(const SpectralEngine& e, int n, int k_max);

// sum_n (1 - rho) rho^n P(nu = m | N_0 = n), with the n-sum in closed form.
double stationary_nu(const SpectralEngine& e, int m);

// (1 / (1 + rho)) integral Q(x; rho) Q_n(x) / (1 - x) dpsi; equals 1.
double eqtech_integral(const SpectralEngine& e, int n);

// kappa*(z) = ((1 - rho) / (1 + rho)) integral z / (1 - z x) Q(x; rho)^2 dpsi.
// Throws DomainError for |z| > 1.
double kappa_gen(const SpectralEngine& e, double z);

// Outer truncation of the stationary n-sum: the smallest N with
// rho^{N+1} <= epsilon. Throws TruncationError (achieved rho^{n_cap+1}) when
// N > n_cap.
struct OuterTruncation {
    int n_max = 0;
    double achieved = 0.0;
};
OuterTruncation outer_truncation(const QueueParameters& params, const TruncationConfig& trunc);

// P(alpha = j) = ((1 - rho)/(1 + rho)) sum_{n<=N} rho^n sum_{m<=j+n} rho^m
//                integral x^{2j+n-m} Q_m Q_n dpsi,
// evaluated through the coefficient table and the moments in extended
// precision. tail_mass = 1 - sum.
struct MomentPathResult {
    Pmf pmf;
    OuterTruncation outer;
    unsigned digits10 = 0;
};
MomentPathResult delta_pmf_moments(const SpectralEngine& e, int j_max);
Pmf delta_pmf(const SpectralEngine& e, int j_max);

// The same double sum by quadrature on the nodes, with
//   H_K = sum_{m<=K} s^m x^{K-m} P_m = x H_{K-1} + s^K P_K.
Pmf delta_pmf_quadrature(const SpectralEngine& e, int j_max);

// Departure count from the joint law, delta = (kappa - nu + n - 1)/2:
//   P(delta = j) = ((1 - rho)/(1 + rho)) sum_{n<=N} sum_{m>=max(0,n-j)} rho^{n+m}
//                  integral x^{2j+m-n} Q_m Q_n dpsi,
// with the m-series summed backwards from the first m where rho^{m+1} drops
// below series_tol. Independent of the arrival-count formula above.
Pmf departures_pmf_quadrature(const SpectralEngine& e, int j_max);

// Conditional on N_0 = n, from the arrival and departure forms respectively.
double alpha_given_n(const SpectralEngine& e, int n, int j);
double delta_given_n(const SpectralEngine& e, int n, int j);

// P(W_n > y) = s^{-n} integral P_n e^{phi cot theta} D^{-3/2} e^{-D y} (adopted reading).
// Throws DomainError for y < 0.
double sojourn_tail(const SpectralEngine& e, int n, double y);
// Stationary mixture sum_n (1 - rho) rho^n P(W_n > y), n-sum in closed form.
double stationary_sojourn_tail(const SpectralEngine& e, double y);
// Integral over y of the stationary tail by composite Gauss-Legendre on
// doubling panels, cut where the tail bound drops below cut_tol.
double stationary_sojourn_mean(const SpectralEngine& e, double cut_tol = 1e-13);

}  // namespace psq

#pragma once

// Residual-busy-period approximation of the departure count: b is the number
// of customers served in the residual busy period started by the tagged
// arrival, b~ the rank of a customer picked uniformly among them.

#include "psq/model.h"

namespace psq {

struct BusyPeriodModel {
    QueueParameters params;
    double series_tol = 1e-14;
    long long k_cap = 50'000'000;
};

// Throws DomainError for series_tol <= 0 or k_cap < 1.
BusyPeriodModel make_busy_period_model(const QueueParameters& params, double series_tol = 1e-14,
                                       long long k_cap = 50'000'000);

// beta(z) = ((1 + rho)/(2 rho)) (1 - sqrt(1 - 4 rho z/(1 + rho)^2)), the number
// served in one busy period. Evaluated as 2z / ((1 + rho)(1 + sqrt(...))).
// Throws SingularityError for z > z0 (branch cut).
double beta_gen(const BusyPeriodModel& m, double z);

// B(z) = (1 - rho) beta(z) / (1 - rho beta(z)). Throws SingularityError for
// z > z0 or on the (unreachable) pole rho beta(z) = 1.
double B_gen(const BusyPeriodModel& m, double z);

// The same function in the closed form with a removable singularity at z = 1:
//   ((1 - rho)(1 + rho) / (2 rho^2 (z - 1))) (1 - 2 rho z/(1 + rho) - sqrt(1 - 4 rho z/(1 + rho)^2)),
// returning the limit 1 at z = 1. Throws SingularityError for z > z0.
double B_gen_closed_form(const BusyPeriodModel& m, double z);

// P(b = l) = ((1 - rho)/(rho (1 + rho))) sum_{k>=l} C(2k, k) u^k / (k + 1),
// u = rho/(1 + rho)^2, for l = 1..l_max; P(b = 0) = 0. Terms are built in
// log space. The series is cut once the geometric bound on its remainder
// falls below series_tol times the partial sum. Throws DomainError for
// l_max < 1 and TruncationError when k_cap is reached first.
Pmf b_pmf(const BusyPeriodModel& m, int l_max);

// P(b~ = j) = sum_{k>=j+1} P(b = k) / k, j = 0..j_max, built backwards from
// the series value at j_max through P(b~ = j) = P(b~ = j + 1) + P(b = j + 1)/(j + 1).
// Throws DomainError for j_max < 0.
Pmf btilde_pmf(const BusyPeriodModel& m, int j_max);

// E z^{b~} = integral_0^1 (B(t) - B(z t)) / (t (1 - z)) dt by composite
// Gauss-Legendre (quad_points per panel) on panels refined towards t = 1.
// Throws DomainError unless 0 <= z < 1 and quad_points >= 2.
double btilde_gen(const BusyPeriodModel& m, double z, int quad_points = 20);

}  // namespace psq

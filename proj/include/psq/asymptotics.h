#pragma once

// Large-index forms of the departure count, the moments of dpsi and the
// busy-period pmfs. All evaluated in log space; the exponential factor of
// every form is z0^{-j} = support_bound^{2j}.

#include "psq/errors.h"
#include "psq/model.h"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace psq {

// log of (4/(1-rho)) e^{2(1+rho)/(1-rho)} sqrt((8/3)(pi/2)^{5/3})
//        * j^{-5/6} e^{-3 (pi/2)^{2/3} j^{1/3}} support_bound^{2j}
// Throws DomainError for j < 1.
double log_delta_asymptote(const QueueParameters& params, int j);
double delta_asymptote(const QueueParameters& params, int j);

// log of 2e support_bound^n n^{-5/6} sqrt(8 pi^{5/3}/3) e^{-(3/2) pi^{2/3} n^{1/3}}.
// Throws DomainError unless n >= 2 is even.
double log_moment_asymptote(const QueueParameters& params, int n);
double moment_asymptote(const QueueParameters& params, int n);

// ((1+rho)/(rho(1-rho) sqrt(pi))) j^{-3/2} z0^{-j}. Throws DomainError for j < 1.
double log_b_asymptote(const QueueParameters& params, int j);
double b_asymptote(const QueueParameters& params, int j);

// (4(1+rho)/((1-rho)^3 sqrt(pi))) j^{-5/2} z0^{-j}. Throws DomainError for j < 1.
double log_btilde_asymptote(const QueueParameters& params, int j);
double btilde_asymptote(const QueueParameters& params, int j);

struct AsymptoticReport {
    int index = 0;
    double exact = 0.0;
    double asymptote = 0.0;
    double ratio = 0.0;
    // log(exact_{j+1} / exact_j), the local decay per index (NaN past the window end).
    double log_gap_per_index = 0.0;
};

// One row per index in [lo, hi] comparing exact[index] against asymptote(index).
// exact is indexed from 0. Throws DomainError on an empty or out-of-range window.
template <class Asymptote>
std::vector<AsymptoticReport> compare_with_asymptote(const std::vector<double>& exact, int lo, int hi,
                                                     Asymptote&& asymptote);

struct DecayRow {
    int j = 0;
    double delta_slope = 0.0;   // log P(delta = j+1) - log P(delta = j)
    double btilde_slope = 0.0;  // log P(b~ = j+1) - log P(b~ = j)
    double ratio = 0.0;         // P(delta = j) / P(b~ = j)
};

struct DecayDiagnostics {
    std::vector<DecayRow> rows;
    double decay_rate = 0.0;       // log(4 rho / (1 + rho)^2)
    bool ratio_decreasing = false;  // strictly, over the whole window
    bool delta_below_btilde = false;
};

// Throws DiagnosticsError when the window [lo, hi] has fewer than three
// indices, is not covered by both pmfs, or contains entries below 1e-300.
DecayDiagnostics decay_diagnostics(const Pmf& delta, const Pmf& btilde, const QueueParameters& params,
                                   int lo, int hi);

template <class Asymptote>
std::vector<AsymptoticReport> compare_with_asymptote(const std::vector<double>& exact, int lo, int hi,
                                                     Asymptote&& asymptote) {
    if (lo > hi || lo < 0 || hi >= static_cast<int>(exact.size())) {
        throw DomainError("asymptote comparison window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "] outside the table");
    }
    std::vector<AsymptoticReport> rows;
    for (int j = lo; j <= hi; ++j) {
        AsymptoticReport r;
        r.index = j;
        r.exact = exact[static_cast<std::size_t>(j)];
        r.asymptote = asymptote(j);
        r.ratio = r.exact / r.asymptote;
        r.log_gap_per_index = j + 1 < static_cast<int>(exact.size())
                                  ? std::log(exact[static_cast<std::size_t>(j + 1)] / r.exact)
                                  : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(r);
    }
    return rows;
}

}  // namespace psq

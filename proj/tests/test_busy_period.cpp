#include "oracles.h"

#include "psq/busy_period.h"
#include "psq/errors.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace psq;

namespace {
BusyPeriodModel model(double rho) { return make_busy_period_model(validate_params(rho)); }
}  // namespace

TEST(BetaGen, FixedPointsAndMean) {
    for (double rho : {0.2, 0.5, 0.8}) {
        const BusyPeriodModel m = model(rho);
        EXPECT_NEAR(beta_gen(m, 1.0), 1.0, 1e-15);
        EXPECT_EQ(beta_gen(m, 0.0), 0.0);
        const double h = 1e-5;
        EXPECT_NEAR((beta_gen(m, 1 + h) - beta_gen(m, 1 - h)) / (2 * h), 1 / (1 - rho), 1e-5) << rho;
        // beta = z/(1+rho) + rho/(1+rho) beta^2
        for (double z : {-0.5, 0.3, 0.9}) {
            const double b = beta_gen(m, z);
            EXPECT_NEAR(b, z / (1 + rho) + rho / (1 + rho) * b * b, 1e-15);
        }
    }
    EXPECT_THROW(beta_gen(model(0.5), 1.2), SingularityError);
    EXPECT_NO_THROW(beta_gen(model(0.5), 1.125));
}

TEST(BGen, BoundaryValuesAndMean) {
    for (double rho : {0.2, 0.5, 0.8}) {
        const BusyPeriodModel m = model(rho);
        EXPECT_NEAR(B_gen(m, 1.0), 1.0, 4e-15);
        EXPECT_EQ(B_gen(m, 0.0), 0.0);
        EXPECT_EQ(B_gen_closed_form(m, 1.0), 1.0);
        const double z0 = m.params.z0();
        for (double z : {0.1, 0.5, 0.99, 1.0 - 1e-9, (1.0 + z0) / 2}) {
            // The closed form divides by z - 1 and loses digits next to z = 1.
            const double tol = std::abs(z - 1.0) < 1e-3 ? 1e-6 : 1e-9;
            EXPECT_NEAR(B_gen(m, z), B_gen_closed_form(m, z), tol) << rho << " " << z;
        }
        const double h = 1e-5;
        EXPECT_NEAR((B_gen(m, 1 + h) - B_gen(m, 1 - h)) / (2 * h), 1 / ((1 - rho) * (1 - rho)), 1e-4) << rho;
    }
    EXPECT_THROW(B_gen(model(0.5), 1.5), SingularityError);
    EXPECT_THROW(B_gen_closed_form(model(0.5), 1.5), SingularityError);
}

TEST(BPmf, FirstTermNormalizationMean) {
    for (double rho : {0.2, 0.5, 0.8}) {
        const BusyPeriodModel m = model(rho);
        const int l_max = static_cast<int>(45.0 / -m.params.decay_rate()) + 20;
        const Pmf b = b_pmf(m, l_max);
        EXPECT_EQ(b.at(0), 0.0);
        EXPECT_NEAR(b.at(1), (1 - rho) / (1 + rho), 1e-10);
        EXPECT_NEAR(b.total(), 1.0, 1e-10) << rho;
        EXPECT_NEAR(pmf_mean(b).mean, 1 / ((1 - rho) * (1 - rho)), 1e-8) << rho;
    }
    EXPECT_NEAR(b_pmf(model(0.5), 5).at(1), 1.0 / 3.0, 1e-10);
}

TEST(BPmf, MatchesPowerSeriesCoefficients) {
    for (double rho : {0.2, 0.5, 0.8}) {
        const test::Series ref = test::residual_busy_series(rho, 15);
        const Pmf b = b_pmf(model(rho), 15);
        for (int l = 0; l <= 15; ++l) EXPECT_NEAR(b.at(l), ref[l], 1e-8) << rho << " " << l;
    }
}

TEST(BPmf, Errors) {
    EXPECT_THROW(b_pmf(model(0.5), 0), DomainError);
    EXPECT_THROW(make_busy_period_model(validate_params(0.5), 0.0), DomainError);
    // With rho near 1 the remainder bound needs far more terms than a tiny cap allows.
    const BusyPeriodModel tight = make_busy_period_model(validate_params(0.99), 1e-14, 100);
    EXPECT_THROW(b_pmf(tight, 10), TruncationError);
}

TEST(BtildePmf, NormalizedMonotoneAndTailSum) {
    for (double rho : {0.2, 0.5, 0.8}) {
        const BusyPeriodModel m = model(rho);
        const int j_max = static_cast<int>(45.0 / -m.params.decay_rate()) + 20;
        const Pmf bt = btilde_pmf(m, j_max);
        const Pmf b = b_pmf(m, j_max + 1);
        EXPECT_NEAR(bt.total(), 1.0, 1e-9) << rho;
        for (int j = 0; j < j_max; ++j) {
            EXPECT_GE(bt.at(j), bt.at(j + 1));
            EXPECT_NEAR(bt.at(j) - bt.at(j + 1), b.at(j + 1) / (j + 1), 1e-15);
        }
        double inv_mean = 0.0;
        for (int k = 1; k <= j_max + 1; ++k) inv_mean += b.at(k) / k;
        EXPECT_NEAR(bt.at(0), inv_mean, 1e-12);
    }
    EXPECT_THROW(btilde_pmf(model(0.5), -1), DomainError);
}

TEST(BtildePmf, MonteCarloRankOfBusyPeriod) {
    // b = number served in the residual busy period: the N0 + 1 customers
    // present after the tagged arrival each start an independent M/M/1 busy
    // period. b~ is uniform on {0, ..., b - 1}.
    const double rho = 0.5;
    std::mt19937_64 g(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int R = 200'000;
    int zeros = 0;
    for (int r = 0; r < R; ++r) {
        int n = 0;
        while (u(g) < rho) ++n;  // N0 geometric
        long long present = n + 1;
        long long served = 0;
        while (present > 0) {
            if (u(g) < rho / (1 + rho)) {
                ++present;
            } else {
                --present;
                ++served;
            }
        }
        const auto rank = static_cast<long long>(u(g) * static_cast<double>(served));
        if (rank == 0) ++zeros;
    }
    const double p_hat = static_cast<double>(zeros) / R;
    const double p = btilde_pmf(model(rho), 10).at(0);
    EXPECT_NEAR(p_hat, p, 3 * std::sqrt(p * (1 - p) / R));
}

TEST(BtildeGen, AgreesWithSeries) {
    for (double rho : {0.2, 0.5, 0.8}) {
        const BusyPeriodModel m = model(rho);
        const int j_max = static_cast<int>(45.0 / -m.params.decay_rate()) + 20;
        const Pmf bt = btilde_pmf(m, j_max);
        EXPECT_NEAR(btilde_gen(m, 0.0), bt.at(0), 1e-6) << rho;
        double s = 0.0;
        for (int j = 0; j <= j_max; ++j) s += std::pow(0.5, j) * bt.at(j);
        EXPECT_NEAR(btilde_gen(m, 0.5), s, 1e-7) << rho;
        EXPECT_NEAR(btilde_gen(m, 1.0 - 1e-7), 1.0, 1e-4) << rho;
    }
    const BusyPeriodModel m = model(0.5);
    const Pmf bt = btilde_pmf(m, 60);
    double s = 0.0;
    for (int j = 0; j <= 60; ++j) s += std::pow(0.5, j) * bt.at(j);
    EXPECT_NEAR(btilde_gen(m, 0.5), s, 1e-7);
    EXPECT_THROW(btilde_gen(m, 1.0), DomainError);
    EXPECT_THROW(btilde_gen(m, -0.1), DomainError);
    EXPECT_THROW(btilde_gen(m, 0.5, 1), DomainError);
}

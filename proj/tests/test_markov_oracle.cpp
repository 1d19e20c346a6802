#include "oracles.h"

#include "psq/errors.h"
#include "psq/markov_oracle.h"

#include <gtest/gtest.h>

#include <cmath>

using namespace psq;

TEST(BuildChain, CoefficientsAtHalfLoad) {
    const TruncatedChain c = build_chain(validate_params(0.5), 32);
    EXPECT_NEAR(c.absorb()[0], 1.0 / 1.5, 1e-15);
    EXPECT_NEAR(c.up(), 1.0 / 3.0, 1e-15);
    EXPECT_EQ(c.down()[0], 0.0);
    EXPECT_NEAR(c.absorb()[1], 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(c.down()[1], 1.0 / 3.0, 1e-15);
    EXPECT_THROW(build_chain(validate_params(0.5), 0), DomainError);
}

TEST(BuildChain, RowsAreStochasticAndReversible) {
    for (double rho : {0.2, 0.5, 0.8}) {
        const TruncatedChain c = build_chain(validate_params(rho), 64);
        for (int n = 0; n < c.cap(); ++n) {
            EXPECT_NEAR(c.absorb()[n] + c.down()[n] + c.up(), 1.0, 1e-15);
            // pi_n a_{n,n+1} = pi_{n+1} a_{n+1,n}, pi_n = (n+1) rho^n.
            const double pn = (n + 1) * std::pow(rho, n);
            const double pn1 = (n + 2) * std::pow(rho, n + 1);
            EXPECT_NEAR(pn * c.up(), pn1 * c.down()[n + 1], 1e-15 * pn);
        }
    }
}

TEST(DefaultStateCap, PowerOfTwoBelowStationaryTolerance) {
    for (double rho : {0.1, 0.5, 0.8, 0.95}) {
        const int M = default_state_cap(validate_params(rho));
        EXPECT_GE(M, 16);
        EXPECT_EQ(M & (M - 1), 0);
        EXPECT_LT(std::pow(rho, M), 1e-14);
    }
}

TEST(OracleJoint, FirstStepsByHand) {
    const QueueParameters p = validate_params(0.5);
    const TruncatedChain c = build_chain(p, 64);
    for (int n0 = 0; n0 <= 5; ++n0) {
        const JointDistribution j = oracle_joint(c, n0, 3, 10);
        EXPECT_NEAR(j.at(1, n0), 1.0 / ((n0 + 1) * 1.5), 1e-15);
    }
    const JointDistribution j0 = oracle_joint(c, 0, 3, 10);
    EXPECT_NEAR(j0.at(2, 1), 1.0 / 9.0, 1e-15);
    for (int m = 0; m <= 10; ++m) {
        if (m != 1) {
            EXPECT_EQ(j0.at(2, m), 0.0);
        }
    }
}

TEST(OracleJoint, MassBookkeeping) {
    const TruncatedChain c = build_chain(validate_params(0.5), 400);
    const JointDistribution j = oracle_joint(c, 3, 400, 399);
    double total = 0.0;
    for (int k = 1; k <= 400; ++k) {
        for (int m = 0; m <= 399; ++m) total += j.at(k, m);
    }
    EXPECT_NEAR(total + j.residual + j.leak, 1.0, 1e-12);
    EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(OracleJoint, ParityAndReach) {
    const TruncatedChain c = build_chain(validate_params(0.5), 64);
    for (int n0 : {0, 3, 6}) {
        const JointDistribution j = oracle_joint(c, n0, 30, 30);
        for (int k = 1; k <= 30; ++k) {
            for (int m = 0; m <= 30; ++m) {
                const int d = std::abs(m - n0);
                if ((k - 1 - d) % 2 != 0 || k < 1 + d) {
                    EXPECT_EQ(j.at(k, m), 0.0) << k << "," << m;
                }
            }
        }
    }
}

TEST(OracleJoint, MatchesDenseMatrixPowers) {
    for (double rho : {0.2, 0.5, 0.8}) {
        const int M = 48;
        const TruncatedChain c = build_chain(validate_params(rho), M - 1);
        const test::DenseChain d = test::dense_chain(rho, M);
        for (int n0 : {0, 2, 7}) {
            const JointDistribution j = oracle_joint(c, n0, 25, 20, {1e-15, 1.0, 2'000'000});
            const std::vector<double> ref = test::dense_joint(d, n0, 25);
            for (int k = 1; k <= 25; ++k) {
                for (int m = 0; m <= 20; ++m) {
                    EXPECT_NEAR(j.at(k, m), ref[(k - 1) * M + m], 1e-15) << rho << " " << n0 << " " << k << " " << m;
                }
            }
        }
    }
}

TEST(OracleJoint, MarginalsConsistent) {
    const TruncatedChain c = build_chain(validate_params(0.5), 128);
    const JointDistribution j = oracle_joint(c, 4, 60, c.cap());
    for (int k = 1; k <= 60; ++k) {
        double s = 0.0;
        for (int m = 0; m <= c.cap(); ++m) s += j.at(k, m);
        EXPECT_NEAR(s, j.kappa[k - 1], 1e-15);
    }
    for (int m = 0; m <= 30; ++m) {
        double s = 0.0;
        for (int k = 1; k <= 60; ++k) s += j.at(k, m);
        EXPECT_NEAR(s, j.nu[m], 1e-15);
    }
}

TEST(OracleJoint, Errors) {
    const TruncatedChain c = build_chain(validate_params(0.5), 16);
    EXPECT_THROW(oracle_joint(c, 9, 10, 10), DomainError);
    EXPECT_THROW(oracle_joint(c, 0, 0, 10), DomainError);
    // A tiny cap at heavy load leaks far more than 1e-12.
    const TruncatedChain small = build_chain(validate_params(0.9), 4);
    EXPECT_THROW(oracle_joint(small, 0, 400, 4), EnlargeStateCapError);
}

TEST(OracleMarginals, AbsorptionCoefficientAndResolvent) {
    const QueueParameters p = validate_params(0.5);
    const TruncatedChain c = build_chain(p, default_state_cap(p));
    EXPECT_NEAR(oracle_kappa(c, 0).at(1), 2.0 / 3.0, 1e-15);
    for (int n0 = 0; n0 <= 5; ++n0) {
        const Pmf nu = oracle_nu(c, n0);
        const std::vector<double> r = oracle_nu_resolvent(c, n0);
        EXPECT_TRUE(nu.is_normalized(1e-12));
        for (int m = 0; m < static_cast<int>(r.size()); ++m) EXPECT_NEAR(nu.at(m), r[m], 1e-10);
    }
}

TEST(OracleMarginals, StationaryMixtureIsGeometric) {
    for (double rho : {0.2, 0.5, 0.8}) {
        const QueueParameters p = validate_params(rho);
        const TruncatedChain c = build_chain(p, 2 * default_state_cap(p));
        std::vector<double> mix(40, 0.0);
        for (int n0 = 0; std::pow(rho, n0) > 1e-13; ++n0) {
            const Pmf nu = oracle_nu(c, n0);
            for (int m = 0; m < 40; ++m) mix[m] += p.stationary_weight(n0) * nu.at(m);
        }
        for (int m = 0; m < 40; ++m) EXPECT_NEAR(mix[m], p.stationary_weight(m), 1e-9) << rho << " " << m;
    }
}

TEST(OracleMarginals, CapDoublingIsStable) {
    const QueueParameters p = validate_params(0.5);
    const int M = default_state_cap(p);
    const TruncatedChain a = build_chain(p, M);
    const TruncatedChain b = build_chain(p, 2 * M);
    for (int n0 : {0, 5, 10}) {
        const Pmf ka = oracle_kappa(a, n0);
        const Pmf kb = oracle_kappa(b, n0);
        for (int k = 1; k <= 200; ++k) EXPECT_NEAR(ka.at(k), kb.at(k), 1e-10);
        const Pmf na = oracle_nu(a, n0);
        const Pmf nb = oracle_nu(b, n0);
        for (int m = 0; m <= M; ++m) EXPECT_NEAR(na.at(m), nb.at(m), 1e-10);
    }
}

TEST(OracleAlphaDelta, EqualInDistribution) {
    for (double rho : {0.2, 0.5}) {
        TruncationConfig t;
        t.epsilon = 1e-12;
        const AlphaDelta ad = with_auto_cap(validate_params(rho),
                                            [&](const TruncatedChain& c) { return oracle_alpha_delta(c, 30, t); });
        for (int j = 0; j <= 30; ++j) EXPECT_NEAR(ad.alpha.at(j), ad.delta.at(j), 1e-9) << rho << " " << j;
    }
}

TEST(OracleAlphaDelta, TailMassBookkeeping) {
    // The stored tail is exactly what the table misses: the outer n-sum cut
    // plus P(delta > j_max). At rho = 0.5, j_max = 60 the second part is
    // about 2.6e-8 on its own, so the tail cannot drop below 1e-8.
    TruncationConfig t;
    t.epsilon = 1e-10;
    const AlphaDelta ad = with_auto_cap(validate_params(0.5),
                                        [&](const TruncatedChain& c) { return oracle_alpha_delta(c, 60, t); });
    EXPECT_NEAR(ad.delta.total() + ad.delta.tail_mass(), 1.0, 1e-14);
    EXPECT_GT(ad.delta.tail_mass(), 1e-8);
    EXPECT_LT(ad.delta.tail_mass(), 5e-8);
}

TEST(OracleAlphaDelta, MeanDepartures) {
    TruncationConfig t;
    t.epsilon = 1e-12;
    const AlphaDelta ad = with_auto_cap(validate_params(0.5),
                                        [&](const TruncatedChain& c) { return oracle_alpha_delta(c, 250, t); });
    EXPECT_NEAR(pmf_mean(ad.delta).mean, 1.0, 1e-4);
    EXPECT_NEAR(pmf_mean(ad.alpha).mean, 1.0, 1e-4);
}

TEST(OracleAlphaDelta, Errors) {
    TruncationConfig t;
    t.epsilon = 1e-300;
    t.n_cap = 20;
    const QueueParameters p = validate_params(0.5);
    EXPECT_THROW(oracle_alpha_delta(build_chain(p, 1024), 10, t), TruncationError);
    TruncationConfig ok;
    ok.epsilon = 1e-10;
    EXPECT_THROW(oracle_alpha_delta(build_chain(p, 16), 10, ok), EnlargeStateCapError);
}

TEST(OracleSojourn, BoundaryAndLightTraffic) {
    const QueueParameters p = validate_params(0.5);
    const TruncatedChain c = build_chain(p, default_state_cap(p));
    for (int n0 : {0, 3, 8}) EXPECT_NEAR(oracle_sojourn_tail(c, n0, 0.0), 1.0, 1e-12);
    EXPECT_THROW(oracle_sojourn_tail(c, 0, -1.0), DomainError);
    const QueueParameters light = validate_params(0.01);
    const TruncatedChain cl = build_chain(light, default_state_cap(light));
    EXPECT_NEAR(oracle_sojourn_tail(cl, 0, 1.0), std::exp(-1.0), 2e-2);
}

TEST(OracleSojourn, StationaryMeanFromErlangMixture) {
    // sum_n (1-rho) rho^n P(W_n > y) = sum_k P(kappa = k) P(Erlang(k, 1+rho) > y),
    // integrated over y.
    const double rho = 0.5;
    const QueueParameters p = validate_params(rho);
    const TruncatedChain c = build_chain(p, 2 * default_state_cap(p));
    const int k_max = 3000;
    std::vector<double> kappa(k_max + 1, 0.0);
    for (int n0 = 0; std::pow(rho, n0) > 1e-14; ++n0) {
        const Pmf k = oracle_kappa(c, n0);
        for (int i = 1; i <= k_max; ++i) kappa[i] += p.stationary_weight(n0) * k.at(i);
    }
    auto tail = [&](double y) {
        const std::vector<double> e = erlang_tails(k_max, 1 + rho, y);
        double s = 0.0;
        for (int i = 1; i <= k_max; ++i) s += kappa[i] * e[i - 1];
        return s;
    };
    EXPECT_NEAR(tail(0.0), 1.0, 1e-12);
    const double mean = test::integrate(tail, 0.0, 400.0, 400);
    EXPECT_NEAR(mean, 1.0 / (1.0 - rho), 1e-4);
}

TEST(ErlangTails, SmallCases) {
    const std::vector<double> e = erlang_tails(3, 2.0, 0.5);
    EXPECT_NEAR(e[0], std::exp(-1.0), 1e-15);
    EXPECT_NEAR(e[1], 2 * std::exp(-1.0), 1e-15);
    EXPECT_NEAR(e[2], 2.5 * std::exp(-1.0), 1e-15);
}

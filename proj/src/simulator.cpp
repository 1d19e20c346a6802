#include "psq/simulator.h"

#include "psq/errors.h"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <atomic>
#include <thread>

namespace psq {

namespace {

constexpr std::uint64_t kChunk = 4096;

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void bump(std::vector<std::uint64_t>& counts, int index) {
    const auto i = static_cast<std::size_t>(index);
    if (counts.size() <= i) counts.resize(i + 1, 0);
    ++counts[i];
}

void add_counts(std::vector<std::uint64_t>& into, const std::vector<std::uint64_t>& from) {
    if (into.size() < from.size()) into.resize(from.size(), 0);
    for (std::size_t i = 0; i < from.size(); ++i) into[i] += from[i];
}

struct ChunkResult {
    std::vector<std::uint64_t> alpha, delta, nu, kappa, alpha_even, delta_odd;
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    std::uint64_t violations = 0;
};

ChunkResult run_chunk(const QueueParameters& params, const InitialStateSampler& sampler, std::uint64_t seed,
                      std::uint64_t first, std::uint64_t last) {
    ChunkResult c;
    for (std::uint64_t rep = first; rep < last; ++rep) {
        RandomEventSource src(params, sampler, seed, rep);
        const TaggedRecord r = simulate_tagged(src);
        if (!satisfies_identities(r)) ++c.violations;
        bump(c.alpha, r.alpha);
        bump(c.delta, r.delta);
        bump(c.nu, r.nu);
        bump(c.kappa, r.kappa - 1);
        if (rep % 2 == 0) {
            bump(c.alpha_even, r.alpha);
        } else {
            bump(c.delta_odd, r.delta);
        }
        ++c.n;
        const double d = r.sojourn - c.mean;
        c.mean += d / static_cast<double>(c.n);
        c.m2 += d * (r.sojourn - c.mean);
    }
    return c;
}

PmfEstimate finish(std::vector<std::uint64_t> counts, std::uint64_t reps) {
    PmfEstimate e;
    const double r = static_cast<double>(reps);
    e.p.resize(counts.size());
    e.se.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double p = static_cast<double>(counts[i]) / r;
        e.p[i] = p;
        e.se[i] = std::sqrt(p * (1.0 - p) / r);
    }
    e.counts = std::move(counts);
    return e;
}

ChiSquareResult finish_chi_square(double statistic, int bins, int dof) {
    if (dof < 1) throw DomainError("chi-square test needs at least two bins after pooling");
    ChiSquareResult r;
    r.statistic = statistic;
    r.bins = bins;
    r.dof = dof;
    const boost::math::chi_squared dist(static_cast<double>(dof));
    r.p_value = boost::math::cdf(boost::math::complement(dist, statistic));
    return r;
}

}  // namespace

bool satisfies_identities(const TaggedRecord& r) noexcept {
    return r.kappa == r.alpha + r.delta + 1 && r.nu == r.n0 + r.alpha - r.delta && r.sojourn > 0.0 &&
           r.nu >= 0 && r.n0 >= 0;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : state_(mix64(mix64(seed) ^ (stream * 0xD1B54A32D192ED03ULL + 0x8BB84B93962EACC9ULL))) {}

std::uint64_t CounterRng::next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
}

InitialStateSampler::InitialStateSampler(const QueueParameters& params) {
    const double rho = params.rho();
    double pw = 1.0;  // rho^n
    double cum = 0.0;
    for (int n = 0; pw >= 1e-15; ++n) {
        cum += (1.0 - rho) * pw;
        cdf_.push_back(cum);
        pw *= rho;
    }
    cdf_.back() = 1.0;  // residual mass lumped on the last state
}

int InitialStateSampler::sample(double u) const noexcept {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
}

TaggedRecord simulate_tagged(const QueueParameters& params, std::uint64_t seed, std::uint64_t replication) {
    const InitialStateSampler sampler(params);
    RandomEventSource src(params, sampler, seed, replication);
    return simulate_tagged(src);
}

EstimateSet estimate(const QueueParameters& params, std::uint64_t replications, std::uint64_t seed,
                     unsigned workers) {
    if (replications < 1) throw DomainError("replications must be >= 1");
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    const InitialStateSampler sampler(params);
    const std::uint64_t chunks = (replications + kChunk - 1) / kChunk;
    std::vector<ChunkResult> results(chunks);
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (std::uint64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
            results[c] = run_chunk(params, sampler, seed, c * kChunk, std::min(replications, (c + 1) * kChunk));
        }
    };
    {
        std::vector<std::jthread> pool;
        const auto spawn = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));
        for (unsigned w = 1; w < spawn; ++w) pool.emplace_back(work);
        work();
    }

    EstimateSet out;
    out.replications = replications;
    out.seed = seed;
    std::vector<std::uint64_t> alpha, delta, nu, kappa;
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    for (const ChunkResult& c : results) {
        add_counts(alpha, c.alpha);
        add_counts(delta, c.delta);
        add_counts(nu, c.nu);
        add_counts(kappa, c.kappa);
        add_counts(out.alpha_even, c.alpha_even);
        add_counts(out.delta_odd, c.delta_odd);
        out.identity_violations += c.violations;
        // Pairwise merge of running moments, in chunk order.
        const std::uint64_t total = n + c.n;
        const double d = c.mean - mean;
        mean += d * static_cast<double>(c.n) / static_cast<double>(total);
        m2 += c.m2 + d * d * static_cast<double>(n) * static_cast<double>(c.n) / static_cast<double>(total);
        n = total;
    }
    out.alpha = finish(std::move(alpha), replications);
    out.delta = finish(std::move(delta), replications);
    out.nu = finish(std::move(nu), replications);
    out.kappa = finish(std::move(kappa), replications);
    out.sojourn_mean = mean;
    out.sojourn_variance = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    out.sojourn_se = std::sqrt(out.sojourn_variance / static_cast<double>(n));
    out.sojourn_ci_low = mean - 1.959963984540054 * out.sojourn_se;
    out.sojourn_ci_high = mean + 1.959963984540054 * out.sojourn_se;
    return out;
}

ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& counts, const std::vector<double>& probs,
                               double min_expected) {
    double total = 0.0;
    for (auto c : counts) total += static_cast<double>(c);
    std::vector<double> obs(probs.size() + 1, 0.0);
    std::vector<double> exp(probs.size() + 1, 0.0);
    double listed_p = 0.0;
    double listed_c = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        obs[i] = i < counts.size() ? static_cast<double>(counts[i]) : 0.0;
        exp[i] = total * probs[i];
        listed_p += probs[i];
        listed_c += obs[i];
    }
    obs.back() = total - listed_c;
    exp.back() = total * std::max(0.0, 1.0 - listed_p);
    while (obs.size() > 1 && exp.back() < min_expected) {
        obs[obs.size() - 2] += obs.back();
        exp[exp.size() - 2] += exp.back();
        obs.pop_back();
        exp.pop_back();
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (exp[i] > 0.0) stat += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
    }
    const int bins = static_cast<int>(obs.size());
    return finish_chi_square(stat, bins, bins - 1);
}

ChiSquareResult chi_square_two_sample(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
                                      double min_expected) {
    const std::size_t size = std::max(a.size(), b.size());
    std::vector<double> oa(size, 0.0);
    std::vector<double> ob(size, 0.0);
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        oa[i] = i < a.size() ? static_cast<double>(a[i]) : 0.0;
        ob[i] = i < b.size() ? static_cast<double>(b[i]) : 0.0;
        na += oa[i];
        nb += ob[i];
    }
    const double fa = na / (na + nb);
    const double fb = nb / (na + nb);
    auto low = [&](std::size_t i) { return std::min(fa, fb) * (oa[i] + ob[i]) < min_expected; };
    while (oa.size() > 1 && low(oa.size() - 1)) {
        oa[oa.size() - 2] += oa.back();
        ob[ob.size() - 2] += ob.back();
        oa.pop_back();
        ob.pop_back();
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < oa.size(); ++i) {
        const double pooled = oa[i] + ob[i];
        if (pooled == 0.0) continue;
        const double ea = fa * pooled;
        const double eb = fb * pooled;
        stat += (oa[i] - ea) * (oa[i] - ea) / ea + (ob[i] - eb) * (ob[i] - eb) / eb;
    }
    const int bins = static_cast<int>(oa.size());
    return finish_chi_square(stat, bins, bins - 1);
}

}  // namespace psq

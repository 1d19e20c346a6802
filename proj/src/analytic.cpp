#include "psq/analytic.h"

#include "psq/errors.h"
#include "psq/kernels.h"
#include "psq/pollaczek.h"

#include <cmath>
#include <string>

namespace psq {

namespace {

using Vec = std::vector<double>;

void require_index(int v, int lo, const char* what) {
    if (v < lo) throw DomainError(std::string(what) + " must be >= " + std::to_string(lo));
}

// x_i^p over the nodes.
Vec node_power(const SpectralEngine& e, int p) {
    const auto x = e.measure().x();
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::pow(x[i], p);
    return out;
}

// Powers x^0 .. x^p_max over the nodes.
std::vector<Vec> node_powers(const SpectralEngine& e, int p_max) {
    std::vector<Vec> out;
    out.reserve(static_cast<std::size_t>(p_max) + 1);
    out.emplace_back(e.measure().size(), 1.0);
    for (int p = 1; p <= p_max; ++p) {
        Vec next(e.measure().size());
        kernels::multiply(out.back(), e.measure().x(), next);
        out.push_back(std::move(next));
    }
    return out;
}

// H_0 .. H_{k_max}: H_K = x H_{K-1} + s^K P_K.
std::vector<Vec> arrival_partials(const SpectralEngine& e, int k_max) {
    const double s = e.params().sqrt_rho();
    std::vector<Vec> h;
    h.reserve(static_cast<std::size_t>(k_max) + 1);
    h.emplace_back(e.pollaczek(0).begin(), e.pollaczek(0).end());
    for (int k = 1; k <= k_max; ++k) {
        Vec next(e.measure().size());
        kernels::horner_step(e.measure().x(), h.back(), std::pow(s, k), e.pollaczek(k), next);
        h.push_back(std::move(next));
    }
    return h;
}

// First m with rho^{m+1} <= series_tol.
int series_cut(const SpectralEngine& e) {
    const double lr = std::log(e.params().rho());
    const double lt = std::log(e.trunc().series_tol);
    int m = 0;
    while (static_cast<double>(m + 1) * lr > lt) ++m;
    return m;
}

// F_0 .. F_{d_max}: F_d = sum_{m>=d} s^m x^{m-d} P_m, summed back from m_top.
std::vector<Vec> departure_partials(const SpectralEngine& e, int d_max, int m_top) {
    const double s = e.params().sqrt_rho();
    m_top = std::max(m_top, d_max);
    std::vector<Vec> f(static_cast<std::size_t>(d_max) + 1);
    Vec cur(e.measure().size(), 0.0);
    Vec next(e.measure().size());
    for (int d = m_top; d >= 0; --d) {
        kernels::horner_step(e.measure().x(), cur, std::pow(s, d), e.pollaczek(d), next);
        cur.swap(next);
        if (d <= d_max) f[static_cast<std::size_t>(d)] = cur;
    }
    return f;
}

double tail_total(const Vec& probs) {
    double t = 1.0;
    for (double p : probs) t -= p;
    return std::max(0.0, t);
}

}  // namespace

std::string_view reading_name(SojournReading r) noexcept {
    switch (r) {
        case SojournReading::literal_density: return "literal_density";
        case SojournReading::literal_dtheta: return "literal_dtheta";
        case SojournReading::measure: return "measure";
    }
    return "unknown";
}

std::span<const double> SpectralEngine::pollaczek(int n) const {
    if (n < 0) throw DomainError("polynomial degree must be >= 0");
    if (n > capacity_) {
        throw CapacityError("degree " + std::to_string(n) + " exceeds engine capacity " +
                            std::to_string(capacity_));
    }
    const std::size_t size = measure_.size();
    return std::span<const double>(poly_).subspan(static_cast<std::size_t>(n) * size, size);
}

SpectralEngine make_engine(const QueueParameters& params, const EngineOptions& options) {
    options.trunc.validate();
    const int capacity = options.capacity < 0 ? options.trunc.n_cap + 200 : options.capacity;
    if (capacity < 1) throw DomainError("engine capacity must be >= 1");

    SpectralEngine e(params, build_quadrature(params, options.panels, options.order));
    e.trunc_ = options.trunc;
    e.capacity_ = capacity;

    const SpectralMeasure& m = e.measure_;
    const std::size_t size = m.size();
    const auto cos_t = m.cos_theta();
    e.poly_.assign(static_cast<std::size_t>(capacity + 1) * size, 0.0);
    std::span<double> all(e.poly_);
    std::fill_n(all.begin(), size, 1.0);
    for (std::size_t i = 0; i < size; ++i) all[size + i] = 2.0 * cos_t[i];
    // (n+1) P_{n+1} = 2 (n+1) cos(theta) P_n - n P_{n-1}
    for (int n = 1; n < capacity; ++n) {
        const auto off = static_cast<std::size_t>(n) * size;
        kernels::recurrence_step(2.0, static_cast<double>(n) / static_cast<double>(n + 1), cos_t,
                                 all.subspan(off, size), all.subspan(off - size, size),
                                 all.subspan(off + size, size));
    }

    const double s = params.sqrt_rho();
    const double rho = params.rho();
    const auto theta = m.theta();
    const auto w = m.weights();
    const auto dtheta = m.dtheta_weights();
    e.generating_.resize(size);
    e.resolvent_weights_.resize(size);
    e.decay_.resize(size);
    std::array<Vec, 3> candidates{Vec(size), Vec(size), Vec(size)};
    for (std::size_t i = 0; i < size; ++i) {
        e.generating_[i] = gen_P(theta[i], s);
        e.resolvent_weights_[i] = w[i] / (1.0 - m.x()[i]);
        const double d = 1.0 + rho - 2.0 * s * cos_t[i];
        e.decay_[i] = d;
        const double sin_t = std::sin(theta[i]);
        const double base = std::exp(phi(theta[i], params) * cos_t[i] / sin_t) * std::pow(d, -1.5);
        candidates[0][i] = w[i] * sin_t * base;
        candidates[1][i] = dtheta[i] * sin_t * base;
        candidates[2][i] = w[i] * base;
    }
    bool adopted = false;
    for (std::size_t r = 0; r < kSojournReadings.size(); ++r) {
        double total = 0.0;
        for (double v : candidates[r]) total += v;
        e.reading_norms_[r] = total;
        if (!adopted && std::abs(total - 1.0) <= 1e-8) {
            adopted = true;
            e.reading_ = kSojournReadings[r];
            e.sojourn_weights_ = candidates[r];
        }
    }
    if (!adopted) {
        throw QuadratureDiagnosticError("no reading of the sojourn-tail integral normalizes at n = 0, y = 0");
    }
    return e;
}

double nu_given_n(const SpectralEngine& e, int n, int m) {
    require_index(n, 0, "n");
    require_index(m, 0, "m");
    const double s = e.params().sqrt_rho();
    const double v = kernels::weighted_dot(e.resolvent_weights(), e.pollaczek(m), e.pollaczek(n));
    return std::pow(s, m - n) * v / (1.0 + e.params().rho());
}

double kappa_given_n(const SpectralEngine& e, int n, int k) {
    require_index(n, 0, "n");
    require_index(k, 1, "k");
    const double s = e.params().sqrt_rho();
    Vec a(e.measure().size());
    kernels::multiply(node_power(e, k - 1), e.generating(), a);
    const double v = kernels::weighted_dot(e.measure().weights(), a, e.pollaczek(n));
    return std::pow(s, -n) * v / (1.0 + e.params().rho());
}

double joint_given_n(const SpectralEngine& e, int n, int k, int m) {
    require_index(n, 0, "n");
    require_index(k, 1, "k");
    require_index(m, 0, "m");
    const double s = e.params().sqrt_rho();
    Vec a(e.measure().size());
    kernels::multiply(node_power(e, k - 1), e.pollaczek(m), a);
    const double v = kernels::weighted_dot(e.measure().weights(), a, e.pollaczek(n));
    return std::pow(s, m - n) * v / (1.0 + e.params().rho());
}

std::vector<double> nu_table_given_n(const SpectralEngine& e, int n, int m_max) {
    require_index(m_max, 0, "m_max");
    Vec out(static_cast<std::size_t>(m_max) + 1);
    for (int m = 0; m <= m_max; ++m) out[static_cast<std::size_t>(m)] = nu_given_n(e, n, m);
    return out;
}

std::vector<double> kappa_table_given_n(const SpectralEngine& e, int n, int k_max) {
    require_index(n, 0, "n");
    require_index(k_max, 1, "k_max");
    const double scale = std::pow(e.params().sqrt_rho(), -n) / (1.0 + e.params().rho());
    Vec a(e.measure().size());
    kernels::multiply(e.generating(), e.pollaczek(n), a);
    Vec out(static_cast<std::size_t>(k_max));
    for (int k = 1; k <= k_max; ++k) {
        out[static_cast<std::size_t>(k - 1)] = scale * kernels::weighted_sum(e.measure().weights(), a);
        kernels::multiply(a, e.measure().x(), a);
    }
    return out;
}

double stationary_nu(const SpectralEngine& e, int m) {
    require_index(m, 0, "m");
    const double rho = e.params().rho();
    const double v = kernels::weighted_dot(e.resolvent_weights(), e.pollaczek(m), e.generating());
    return (1.0 - rho) / (1.0 + rho) * std::pow(e.params().sqrt_rho(), m) * v;
}

double eqtech_integral(const SpectralEngine& e, int n) {
    require_index(n, 0, "n");
    const double v = kernels::weighted_dot(e.resolvent_weights(), e.generating(), e.pollaczek(n));
    return std::pow(e.params().sqrt_rho(), -n) * v / (1.0 + e.params().rho());
}

double kappa_gen(const SpectralEngine& e, double z) {
    if (!(std::abs(z) <= 1.0)) throw DomainError("kappa generating function needs |z| <= 1");
    const double rho = e.params().rho();
    const auto x = e.measure().x();
    const auto w = e.measure().weights();
    const auto g = e.generating();
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * z / (1.0 - z * x[i]) * g[i] * g[i];
    return (1.0 - rho) / (1.0 + rho) * s;
}

OuterTruncation outer_truncation(const QueueParameters& params, const TruncationConfig& trunc) {
    trunc.validate();
    const double lr = std::log(params.rho());
    const double le = std::log(trunc.epsilon);
    int n = 0;
    while (static_cast<double>(n + 1) * lr > le) ++n;
    if (n > trunc.n_cap) {
        throw TruncationError("outer sum needs n up to " + std::to_string(n) + " for epsilon " +
                                  describe(trunc.epsilon) + " but n_cap is " +
                                  std::to_string(trunc.n_cap),
                              std::pow(params.rho(), trunc.n_cap + 1));
    }
    return OuterTruncation{n, std::pow(params.rho(), n + 1)};
}

Pmf delta_pmf(const SpectralEngine& e, int j_max) { return delta_pmf_moments(e, j_max).pmf; }

Pmf delta_pmf_quadrature(const SpectralEngine& e, int j_max) {
    require_index(j_max, 0, "j_max");
    const OuterTruncation outer = outer_truncation(e.params(), e.trunc());
    const int n_max = outer.n_max;
    const double rho = e.params().rho();
    const double s = e.params().sqrt_rho();
    const double c = (1.0 - rho) / (1.0 + rho);
    const std::vector<Vec> h = arrival_partials(e, j_max + n_max);
    const std::vector<Vec> xp = node_powers(e, j_max);

    Vec probs(static_cast<std::size_t>(j_max) + 1);
    Vec acc(e.measure().size());
    for (int j = 0; j <= j_max; ++j) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int n = 0; n <= n_max; ++n) {
            kernels::accumulate_product(std::pow(s, n), e.pollaczek(n),
                                        h[static_cast<std::size_t>(j + n)], acc);
        }
        probs[static_cast<std::size_t>(j)] =
            c * kernels::weighted_dot(e.measure().weights(), xp[static_cast<std::size_t>(j)], acc);
    }
    const double tail = tail_total(probs);
    return Pmf(0, std::move(probs), tail);
}

Pmf departures_pmf_quadrature(const SpectralEngine& e, int j_max) {
    require_index(j_max, 0, "j_max");
    const OuterTruncation outer = outer_truncation(e.params(), e.trunc());
    const int n_max = outer.n_max;
    const double rho = e.params().rho();
    const double s = e.params().sqrt_rho();
    const double c = (1.0 - rho) / (1.0 + rho);
    const std::vector<Vec> f = departure_partials(e, n_max, series_cut(e));
    const std::vector<Vec> xp = node_powers(e, 2 * j_max);

    Vec probs(static_cast<std::size_t>(j_max) + 1);
    Vec acc(e.measure().size());
    Vec low(e.measure().size());
    for (int j = 0; j <= j_max; ++j) {
        std::fill(acc.begin(), acc.end(), 0.0);
        std::fill(low.begin(), low.end(), 0.0);
        for (int n = 0; n <= n_max; ++n) {
            const double sn = std::pow(s, n);
            if (n >= j) {
                kernels::accumulate_product(sn, e.pollaczek(n), f[static_cast<std::size_t>(n - j)], acc);
            } else {
                // x^j F_{n-j} = x^{2j-n} F_0
                kernels::accumulate_product(sn, e.pollaczek(n), xp[static_cast<std::size_t>(2 * j - n)], low);
            }
        }
        const auto w = e.measure().weights();
        probs[static_cast<std::size_t>(j)] =
            c * (kernels::weighted_dot(w, xp[static_cast<std::size_t>(j)], acc) +
                 kernels::weighted_dot(w, f[0], low));
    }
    const double tail = tail_total(probs);
    return Pmf(0, std::move(probs), tail);
}

double alpha_given_n(const SpectralEngine& e, int n, int j) {
    require_index(n, 0, "n");
    require_index(j, 0, "j");
    const std::vector<Vec> h = arrival_partials(e, j + n);
    Vec a(e.measure().size());
    kernels::multiply(node_power(e, j), h.back(), a);
    const double r = kernels::weighted_dot(e.measure().weights(), e.pollaczek(n), a);
    return std::pow(e.params().sqrt_rho(), -n) * r / (1.0 + e.params().rho());
}

double delta_given_n(const SpectralEngine& e, int n, int j) {
    require_index(n, 0, "n");
    require_index(j, 0, "j");
    const int d = n - j;
    const std::vector<Vec> f = departure_partials(e, std::max(d, 0), series_cut(e));
    Vec a(e.measure().size());
    if (d >= 0) {
        kernels::multiply(node_power(e, j), f[static_cast<std::size_t>(d)], a);
    } else {
        kernels::multiply(node_power(e, 2 * j - n), f[0], a);
    }
    const double r = kernels::weighted_dot(e.measure().weights(), e.pollaczek(n), a);
    return std::pow(e.params().sqrt_rho(), -n) * r / (1.0 + e.params().rho());
}

double sojourn_tail(const SpectralEngine& e, int n, double y) {
    require_index(n, 0, "n");
    if (!(y >= 0.0)) throw DomainError("sojourn threshold must be >= 0");
    const auto d = e.decay();
    Vec decay(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) decay[i] = std::exp(-d[i] * y);
    const double v = kernels::weighted_dot(e.sojourn_weights(), e.pollaczek(n), decay);
    return std::pow(e.params().sqrt_rho(), -n) * v;
}

double stationary_sojourn_tail(const SpectralEngine& e, double y) {
    if (!(y >= 0.0)) throw DomainError("sojourn threshold must be >= 0");
    const auto d = e.decay();
    Vec decay(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) decay[i] = std::exp(-d[i] * y);
    return (1.0 - e.params().rho()) * kernels::weighted_dot(e.sojourn_weights(), e.generating(), decay);
}

double stationary_sojourn_mean(const SpectralEngine& e, double cut_tol) {
    double d_min = e.decay()[0];
    for (double d : e.decay()) d_min = std::min(d_min, d);
    const GaussRule rule = gauss_legendre(20);
    double total = 0.0;
    double lo = 0.0;
    double hi = 0.5;
    for (;;) {
        const double mid = 0.5 * (lo + hi);
        const double rad = 0.5 * (hi - lo);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            total += rad * rule.weights[k] * stationary_sojourn_tail(e, mid + rad * rule.nodes[k]);
        }
        // The tail is a positive mixture of e^{-D y}, D >= d_min.
        if (std::exp(-d_min * hi) / d_min < cut_tol) break;
        lo = hi;
        hi *= 2.0;
    }
    return total;
}

}  // namespace psq

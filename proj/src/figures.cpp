#include "psq/figures.h"

#include "psq/analytic.h"
#include "psq/asymptotics.h"
#include "psq/busy_period.h"
#include "psq/errors.h"
#include "psq/simulator.h"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace psq {

namespace {

using Row = std::vector<std::optional<double>>;

std::string meta_text(const Table::MetaValue& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
    return std::to_string(std::get<std::int64_t>(v));
}

Table make_table(std::string schema, std::vector<std::string> columns) {
    Table t;
    t.schema = std::move(schema);
    t.columns = std::move(columns);
    t.meta.emplace_back("schema", t.schema);
    t.meta.emplace_back("schema_version", std::int64_t{kSchemaVersion});
    t.meta.emplace_back("tool_version", std::string(kToolVersion));
    return t;
}

SpectralEngine engine_for(const FigureOptions& o) {
    if (o.j_max < 0) throw DomainError("jmax must be >= 0");
    EngineOptions eo;
    eo.trunc = o.trunc;
    eo.panels = o.panels;
    eo.order = o.order;
    return make_engine(validate_params(o.rho), eo);
}

void add_engine_meta(Table& t, const FigureOptions& o, const MomentPathResult& mp) {
    t.meta.emplace_back("rho", o.rho);
    t.meta.emplace_back("j_max", std::int64_t{o.j_max});
    t.meta.emplace_back("epsilon_target", o.trunc.epsilon);
    t.meta.emplace_back("epsilon_achieved", mp.outer.achieved);
    t.meta.emplace_back("n_cap", std::int64_t{o.trunc.n_cap});
    t.meta.emplace_back("n_cap_used", std::int64_t{mp.outer.n_max});
    t.meta.emplace_back("precision_digits", std::int64_t{mp.digits10});
    t.meta.emplace_back("quadrature_panels", std::int64_t{o.panels});
    t.meta.emplace_back("quadrature_order", std::int64_t{o.order});
    t.meta.emplace_back("delta_tail_mass", mp.pmf.tail_mass());
}

std::optional<double> asymptote_or_empty(double (*f)(const QueueParameters&, int), const QueueParameters& p,
                                         int j) {
    if (j < 1) return std::nullopt;
    return f(p, j);
}

std::optional<double> log_slope(double p0, double p1) {
    if (!(p0 > 0.0 && p1 > 0.0)) return std::nullopt;
    return std::log(p1 / p0);
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const Table& t) {
    std::string out;
    for (const auto& [key, value] : t.meta) out += "# " + key + ": " + meta_text(value) + "\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + t.columns[c];
    out += "\n";
    for (const Row& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ",";
            if (row[c]) out += format_number(*row[c]);
        }
        out += "\n";
    }
    return out;
}

std::string to_json(const Table& t) {
    nlohmann::ordered_json doc;
    auto& meta = doc["meta"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : t.meta) {
        std::visit([&](const auto& v) { meta[key] = v; }, value);
    }
    doc["columns"] = t.columns;
    auto& rows = doc["rows"] = nlohmann::ordered_json::array();
    for (const Row& row : t.rows) {
        auto r = nlohmann::ordered_json::array();
        for (const auto& cell : row) {
            if (cell) {
                r.push_back(*cell);
            } else {
                r.push_back(nullptr);
            }
        }
        rows.push_back(std::move(r));
    }
    return doc.dump(2) + "\n";
}

Table delta_table(const FigureOptions& o) {
    const SpectralEngine e = engine_for(o);
    const MomentPathResult mp = delta_pmf_moments(e, o.j_max);
    const Pmf quad = delta_pmf_quadrature(e, o.j_max);
    Table t = make_table("psq.delta", {"j", "p_delta", "p_delta_quadrature_path", "asymptote", "ratio"});
    add_engine_meta(t, o, mp);
    for (int j = 0; j <= o.j_max; ++j) {
        const double p = mp.pmf.at(j);
        const auto a = asymptote_or_empty(delta_asymptote, e.params(), j);
        t.rows.push_back({double(j), p, quad.at(j), a, a ? std::optional<double>(p / *a) : std::nullopt});
    }
    return t;
}

Table btilde_table(const FigureOptions& o) {
    if (o.j_max < 0) throw DomainError("jmax must be >= 0");
    const QueueParameters params = validate_params(o.rho);
    const BusyPeriodModel m = make_busy_period_model(params, o.trunc.series_tol);
    const Pmf b = b_pmf(m, std::max(1, o.j_max));
    const Pmf bt = btilde_pmf(m, o.j_max);
    Table t = make_table("psq.btilde", {"j", "p_b", "p_btilde", "btilde_asymptote"});
    t.meta.emplace_back("rho", o.rho);
    t.meta.emplace_back("j_max", std::int64_t{o.j_max});
    t.meta.emplace_back("series_tol", o.trunc.series_tol);
    t.meta.emplace_back("b_tail_mass", b.tail_mass());
    t.meta.emplace_back("btilde_tail_mass", bt.tail_mass());
    for (int j = 0; j <= o.j_max; ++j) {
        t.rows.push_back({double(j), b.at(j), bt.at(j), asymptote_or_empty(btilde_asymptote, params, j)});
    }
    return t;
}

Table compare_table(const FigureOptions& o) {
    const SpectralEngine e = engine_for(o);
    // One index past j_max for the forward log slopes.
    const MomentPathResult mp = delta_pmf_moments(e, o.j_max + 1);
    const BusyPeriodModel m = make_busy_period_model(e.params(), o.trunc.series_tol);
    const Pmf bt = btilde_pmf(m, o.j_max + 1);
    Table t = make_table("psq.compare", {"j", "p_delta", "p_btilde", "ratio", "delta_asymptote",
                                         "btilde_asymptote", "log_slope_delta", "log_slope_btilde"});
    add_engine_meta(t, o, mp);
    t.meta.emplace_back("decay_rate", e.params().decay_rate());
    for (int j = 0; j <= o.j_max; ++j) {
        const double pd = mp.pmf.at(j);
        const double pb = bt.at(j);
        t.rows.push_back({double(j), pd, pb, pb > 0.0 ? std::optional<double>(pd / pb) : std::nullopt,
                          asymptote_or_empty(delta_asymptote, e.params(), j),
                          asymptote_or_empty(btilde_asymptote, e.params(), j), log_slope(pd, mp.pmf.at(j + 1)),
                          log_slope(pb, bt.at(j + 1))});
    }
    return t;
}

Table simulate_table(const SimulateOptions& o) {
    if (o.j_max < 0) throw DomainError("jmax must be >= 0");
    const QueueParameters params = validate_params(o.rho);
    const EstimateSet est = estimate(params, o.replications, o.seed, o.workers);
    Table t = make_table("psq.simulate", {"j", "p_alpha", "se_alpha", "p_delta", "se_delta", "p_nu", "se_nu",
                                          "p_kappa", "se_kappa"});
    t.meta.emplace_back("rho", o.rho);
    t.meta.emplace_back("j_max", std::int64_t{o.j_max});
    t.meta.emplace_back("replications", static_cast<std::int64_t>(o.replications));
    t.meta.emplace_back("seed", static_cast<std::int64_t>(o.seed));
    t.meta.emplace_back("identity_violations", static_cast<std::int64_t>(est.identity_violations));
    t.meta.emplace_back("sojourn_mean", est.sojourn_mean);
    t.meta.emplace_back("sojourn_variance", est.sojourn_variance);
    t.meta.emplace_back("sojourn_se", est.sojourn_se);
    t.meta.emplace_back("sojourn_ci95_low", est.sojourn_ci_low);
    t.meta.emplace_back("sojourn_ci95_high", est.sojourn_ci_high);
    auto cell = [](const std::vector<double>& v, int j) {
        return j < static_cast<int>(v.size()) ? v[static_cast<std::size_t>(j)] : 0.0;
    };
    for (int j = 0; j <= o.j_max; ++j) {
        t.rows.push_back({double(j), cell(est.alpha.p, j), cell(est.alpha.se, j), cell(est.delta.p, j),
                          cell(est.delta.se, j), cell(est.nu.p, j), cell(est.nu.se, j), cell(est.kappa.p, j),
                          cell(est.kappa.se, j)});
    }
    return t;
}

}  // namespace psq

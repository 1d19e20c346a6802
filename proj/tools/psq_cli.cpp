// psq: figure data and validation for the tagged customer of an M/M/1-PS queue.
//
// Exit codes: 0 success, 2 parameter error, 3 numerical or validation failure.

#include "psq/errors.h"
#include "psq/figures.h"
#include "psq/validation.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace {

constexpr int kExitParameter = 2;
constexpr int kExitNumerical = 3;

struct Output {
    std::string format = "csv";
    std::string path;  // empty: stdout
};

void add_output_options(CLI::App* cmd, Output& out) {
    cmd->add_option("--format", out.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--output,-o", out.path,
                    "Output file; relative paths resolve against $PSQ_OUTPUT_DIR when set (default: stdout)");
}

void add_figure_options(CLI::App* cmd, psq::FigureOptions& o) {
    cmd->add_option("--rho", o.rho, "Load, 0 < rho < 1")->required();
    cmd->add_option("--jmax", o.j_max, "Largest index in the table")->capture_default_str();
    cmd->add_option("--epsilon", o.trunc.epsilon, "Target tail mass of the outer n-sum")->capture_default_str();
    cmd->add_option("--n-cap", o.trunc.n_cap, "Hard cap on the outer summation index")->capture_default_str();
    cmd->add_option("--panels", o.panels, "Quadrature panels")->capture_default_str();
    cmd->add_option("--order", o.order, "Gauss-Legendre order per panel")->capture_default_str();
}

void emit(const Output& out, const std::string& text) {
    if (out.path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::filesystem::path p(out.path);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("PSQ_OUTPUT_DIR"); dir && *dir) p = std::filesystem::path(dir) / p;
    }
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error("cannot write " + p.string());
}

std::string render(const psq::Table& t, const Output& out) {
    return out.format == "json" ? psq::to_json(t) : psq::to_csv(t);
}

std::string render(const std::vector<psq::ValidationCheck>& checks, const Output& out) {
    const bool ok = psq::all_passed(checks);
    if (out.format == "json") {
        nlohmann::ordered_json doc;
        doc["schema"] = "psq.validate";
        doc["schema_version"] = psq::kSchemaVersion;
        doc["tool_version"] = std::string(psq::kToolVersion);
        doc["all_passed"] = ok;
        auto& list = doc["checks"] = nlohmann::ordered_json::array();
        auto& failures = doc["failures"] = nlohmann::ordered_json::array();
        for (const auto& c : checks) {
            nlohmann::ordered_json j;
            j["name"] = c.name;
            j["rho"] = c.rho;
            j["value"] = c.value;  // NaN dumps as null
            j["relation"] = c.relation;
            j["tolerance"] = c.tolerance;
            j["passed"] = c.passed;
            j["detail"] = c.detail;
            if (!c.passed) failures.push_back(c.name + "@rho=" + psq::format_number(c.rho));
            list.push_back(std::move(j));
        }
        return doc.dump(2) + "\n";
    }
    std::string s = "# schema: psq.validate\n# schema_version: " + std::to_string(psq::kSchemaVersion) +
                    "\n# tool_version: " + std::string(psq::kToolVersion) +
                    "\n# all_passed: " + (ok ? "true" : "false") + "\n";
    s += "name,rho,value,relation,tolerance,passed,detail\n";
    for (const auto& c : checks) {
        s += c.name + "," + psq::format_number(c.rho) + "," + psq::format_number(c.value) + "," + c.relation + "," +
             psq::format_number(c.tolerance) + "," + (c.passed ? "true" : "false") + ",\"" + c.detail + "\"\n";
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact arrival/departure counts of a tagged customer in the M/M/1 processor-sharing queue"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(psq::kToolVersion));

    Output out;
    psq::FigureOptions fig;
    psq::SimulateOptions sim;
    psq::ValidationOptions val;

    auto* delta = app.add_subcommand("delta", "P(delta = j): moment path, quadrature path and asymptote");
    add_figure_options(delta, fig);
    add_output_options(delta, out);

    auto* btilde = app.add_subcommand("btilde", "Busy-period pmfs P(b = j), P(b~ = j) and the b~ asymptote");
    btilde->add_option("--rho", fig.rho, "Load, 0 < rho < 1")->required();
    btilde->add_option("--jmax", fig.j_max, "Largest index in the table")->capture_default_str();
    add_output_options(btilde, out);

    auto* compare = app.add_subcommand("compare", "delta against the busy-period approximation b~");
    add_figure_options(compare, fig);
    add_output_options(compare, out);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates with standard errors");
    simulate->add_option("--rho", sim.rho, "Load, 0 < rho < 1")->required();
    simulate->add_option("--reps", sim.replications, "Replications")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Seed")->capture_default_str();
    simulate->add_option("--workers", sim.workers, "Worker threads (0: hardware count)")->capture_default_str();
    simulate->add_option("--jmax", sim.j_max, "Largest index in the table")->capture_default_str();
    add_output_options(simulate, out);

    auto* validate = app.add_subcommand("validate", "Oracle-equivalence and invariant suite");
    validate->add_option("--rho", val.rhos, "Loads, comma separated")->delimiter(',')->capture_default_str();
    validate->add_option("--reps", val.mc_replications, "Monte Carlo replications per load")->capture_default_str();
    validate->add_option("--seed", val.mc_seed, "Monte Carlo seed")->capture_default_str();
    add_output_options(validate, out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitParameter;
    }

    try {
        if (delta->parsed()) {
            emit(out, render(psq::delta_table(fig), out));
        } else if (btilde->parsed()) {
            emit(out, render(psq::btilde_table(fig), out));
        } else if (compare->parsed()) {
            emit(out, render(psq::compare_table(fig), out));
        } else if (simulate->parsed()) {
            emit(out, render(psq::simulate_table(sim), out));
        } else if (validate->parsed()) {
            const auto checks = psq::run_validation_suite(val);
            emit(out, render(checks, out));
            if (!psq::all_passed(checks)) {
                for (const auto& c : checks) {
                    if (!c.passed) std::cerr << "FAILED " << c.name << " rho=" << c.rho << " " << c.detail << "\n";
                }
                return kExitNumerical;
            }
        }
    } catch (const psq::DomainError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return kExitParameter;
    } catch (const psq::TruncationError& e) {
        std::cerr << "truncation failure: " << e.what() << " (achieved " << psq::format_number(e.achieved()) << ")\n";
        return kExitNumerical;
    } catch (const psq::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

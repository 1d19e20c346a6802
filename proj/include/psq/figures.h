#pragma once

// Machine-readable tables behind the figure commands of the CLI. Column
// order and metadata keys are part of the versioned schema.

#include "psq/model.h"

#include <cstdint>
#include <optional>
#include <string_view>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace psq {

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

struct Table {
    std::string schema;  // e.g. "psq.delta"
    // CSV prints doubles with %.17g; JSON keeps the type.
    using MetaValue = std::variant<std::string, double, std::int64_t>;
    std::vector<std::pair<std::string, MetaValue>> meta;
    std::vector<std::string> columns;
    // Empty optionals are cells with no defined value (asymptotes at j = 0).
    std::vector<std::vector<std::optional<double>>> rows;
};

// "# key: value" header lines (schema, schema_version, tool_version first),
// then a CSV header row and one line per row; numbers printed with %.17g,
// undefined cells empty.
std::string to_csv(const Table& t);
// {"meta": {...}, "columns": [...], "rows": [[...], ...]}, undefined cells null.
std::string to_json(const Table& t);

// %.17g
std::string format_number(double v);

struct FigureOptions {
    double rho = 0.5;
    int j_max = 40;
    TruncationConfig trunc;
    int panels = 64;
    int order = 20;
};

// j, p_delta, p_delta_quadrature_path, asymptote, ratio
Table delta_table(const FigureOptions& o);
// j, p_b, p_btilde, btilde_asymptote
Table btilde_table(const FigureOptions& o);
// j, p_delta, p_btilde, ratio, delta_asymptote, btilde_asymptote,
// log_slope_delta, log_slope_btilde
Table compare_table(const FigureOptions& o);

struct SimulateOptions {
    double rho = 0.5;
    std::uint64_t replications = 1'000'000;
    std::uint64_t seed = 7;
    unsigned workers = 1;
    int j_max = 40;
};

// j, p_alpha, se_alpha, p_delta, se_delta, p_nu, se_nu, p_kappa, se_kappa
// (kappa at k = j + 1); sojourn statistics in the metadata. The worker count
// is deliberately not recorded: output must not depend on it.
Table simulate_table(const SimulateOptions& o);

}  // namespace psq

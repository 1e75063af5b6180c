#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sepsys/assembly.hpp"
#include "sepsys/bench/cases.hpp"

namespace sepsys {

using Json = nlohmann::ordered_json;

struct RunReport {
    std::string case_id;
    std::uint64_t seed { 0 };
    bool success { false };
    std::optional<std::string> error;
    std::optional<std::string> stage;
    std::vector<std::string> var_names;
    std::optional<GSStructure> structure;
    std::optional<bool> expected_match;
    std::optional<GSModel> model;
    double mse { 0.0 };
    double eps_target { 0.0 };
    std::string expression;
    MbbMetrics metrics;
    MbbConfig settings;
};

struct CaseSummary {
    std::string case_id;
    std::size_t reps { 0 };
    std::size_t successes { 0 };
    std::size_t structure_matches { 0 };
    double mean_mse { 0.0 };
    double max_mse { 0.0 };
    std::size_t blocks { 0 };  // most frequent value
    std::size_t factors { 0 }; // most frequent value
    std::string repeated_vars; // most frequent set, "None" when empty
    double t1_ms { 0.0 }, t2_ms { 0.0 }, t3_ms { 0.0 };
};

[[nodiscard]] auto structure_to_json(GSStructure const& s, std::vector<std::string> const& names) -> Json;
[[nodiscard]] auto report_to_json(RunReport const& r, bool include_timings) -> Json;
// Inverse of report_to_json for the fields it emits.
[[nodiscard]] auto report_from_json(Json const& j) -> RunReport;
[[nodiscard]] auto summarize(std::string const& case_id, std::vector<RunReport const*> const& runs) -> CaseSummary;
[[nodiscard]] auto summary_to_json(CaseSummary const& s, bool include_timings) -> Json;

[[nodiscard]] auto csv_header() -> std::string;
[[nodiscard]] auto csv_row(CaseSummary const& s) -> std::string;

// "x4;x5" style list, "None" when empty.
[[nodiscard]] auto repeated_label(VarSet const& repeated, std::vector<std::string> const& names) -> std::string;

} // namespace sepsys

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sepsys/bench/cases.hpp"
#include "sepsys/bench/report.hpp"

namespace sepsys {

struct RunOptions {
    MbbConfig config;
    std::optional<double> eps_target; // overrides the case's own value
    bool detect_only { false };
};

// Runs the full pipeline (or detection only) and captures any stage
// error inside the report instead of throwing.
[[nodiscard]] auto run_case(CaseSpec const& spec, std::uint64_t seed, RunOptions const& options) -> RunReport;

[[nodiscard]] auto structure_matches(GSStructure const& s, ExpectedStructure const& e) -> bool;

struct SuiteResult {
    std::uint64_t base_seed { 0 };
    std::size_t reps { 0 };
    std::vector<RunReport> runs; // ordered by (case, rep)
    std::vector<CaseSummary> summaries;
};

[[nodiscard]] auto suite_seed(std::uint64_t base_seed, std::string const& case_id, std::size_t rep) -> std::uint64_t;

// Worker count: hardware concurrency, capped by SEPSYS_THREADS when set.
[[nodiscard]] auto worker_count() -> std::size_t;

[[nodiscard]] auto run_suite(std::vector<CaseSpec const*> const& cases, std::size_t reps, std::uint64_t base_seed,
    RunOptions const& options, std::size_t threads = 0) -> SuiteResult;

[[nodiscard]] auto suite_to_json(SuiteResult const& s, bool include_timings) -> Json;
[[nodiscard]] auto suite_to_csv(SuiteResult const& s) -> std::string;

} // namespace sepsys

#include "sepsys/bench/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#include "sepsys/block_detect.hpp"
#include "sepsys/errors.hpp"
#include "sepsys/rng.hpp"

namespace sepsys {

namespace {

auto fnv1a(std::string const& s) -> std::uint64_t
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

auto structure_matches(GSStructure const& s, ExpectedStructure const& e) -> bool
{
    return s.repeated == e.repeated && s.m() == e.blocks && s.factor_count() == e.factors;
}

auto run_case(CaseSpec const& spec, std::uint64_t seed, RunOptions const& options) -> RunReport
{
    RunReport r;
    r.case_id = spec.id;
    r.seed = seed;
    r.var_names = spec.var_names;
    r.settings = options.config;
    r.settings.fit.eps_target = options.eps_target.value_or(spec.eps_target);
    r.eps_target = r.settings.fit.eps_target;
    r.mse = INFINITY;

    auto const target = spec.target();
    try {
        if (options.detect_only) {
            auto const start = std::chrono::steady_clock::now();
            auto const blocks = detect_minimal_blocks(target, spec.domain, r.settings.tol, derive_seed(seed, { 1 }));
            r.structure = detect_factors(target, spec.domain, blocks, r.settings.tol, derive_seed(seed, { 2 }), r.settings.polarity);
            r.metrics.t1_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            r.metrics.evals_detect = target.evaluations();
        } else {
            auto result = run_mbb(target, spec.domain, r.settings, seed);
            r.structure = std::move(result.structure);
            r.metrics = result.metrics;
            r.mse = result.metrics.mse;
            r.expression = render_model(result.model, spec.var_names);
            r.model = std::move(result.model);
            r.success = r.metrics.success;
        }
    } catch (StageError const& e) {
        r.error = e.what();
        r.stage = e.stage();
    } catch (std::exception const& e) {
        r.error = e.what();
        r.stage = options.detect_only ? "detection" : "unknown";
    }
    if (options.detect_only && !r.error) { r.success = true; }
    if (spec.expected && r.structure) { r.expected_match = structure_matches(*r.structure, *spec.expected); }
    return r;
}

auto suite_seed(std::uint64_t base_seed, std::string const& case_id, std::size_t rep) -> std::uint64_t
{
    return derive_seed(base_seed, { fnv1a(case_id), static_cast<std::uint64_t>(rep) });
}

auto worker_count() -> std::size_t
{
    std::size_t n = std::max(1U, std::thread::hardware_concurrency());
    if (auto const* env = std::getenv("SEPSYS_THREADS")) {
        try {
            auto const cap = std::stoul(env);
            if (cap > 0) { n = std::min<std::size_t>(n, cap); }
        } catch (std::exception const&) {
        }
    }
    return n;
}

auto run_suite(std::vector<CaseSpec const*> const& cases, std::size_t reps, std::uint64_t base_seed,
    RunOptions const& options, std::size_t threads) -> SuiteResult
{
    if (reps == 0) { throw std::invalid_argument("reps must be at least 1"); }
    SuiteResult out;
    out.base_seed = base_seed;
    out.reps = reps;
    auto const total = cases.size() * reps;
    out.runs.resize(total);

    std::atomic<std::size_t> next { 0 };
    auto worker = [&] {
        for (auto i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
            auto const& spec = *cases[i / reps];
            auto const rep = i % reps;
            out.runs[i] = run_case(spec, suite_seed(base_seed, spec.id, rep), options);
        }
    };
    auto const n_threads = std::min(total, threads == 0 ? worker_count() : threads);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) { pool.emplace_back(worker); }
        for (auto& t : pool) { t.join(); }
    }

    for (std::size_t c = 0; c < cases.size(); ++c) {
        std::vector<RunReport const*> runs;
        for (std::size_t rep = 0; rep < reps; ++rep) { runs.push_back(&out.runs[c * reps + rep]); }
        out.summaries.push_back(summarize(cases[c]->id, runs));
    }
    return out;
}

auto suite_to_json(SuiteResult const& s, bool include_timings) -> Json
{
    Json j;
    j["base_seed"] = s.base_seed;
    j["reps"] = s.reps;
    Json summaries = Json::array();
    for (auto const& c : s.summaries) { summaries.push_back(summary_to_json(c, include_timings)); }
    j["summary"] = std::move(summaries);
    Json runs = Json::array();
    for (auto const& r : s.runs) { runs.push_back(report_to_json(r, include_timings)); }
    j["runs"] = std::move(runs);
    return j;
}

auto suite_to_csv(SuiteResult const& s) -> std::string
{
    std::string out = csv_header() + "\n";
    for (auto const& c : s.summaries) { out += csv_row(c) + "\n"; }
    return out;
}

} // namespace sepsys

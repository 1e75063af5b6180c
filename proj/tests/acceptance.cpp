// Acceptance run: one PASS/FAIL line per criterion.
//
//   sepsys_acceptance [--cli <path to sepsys>]
//
// Exit status is 0 when the failing criteria are exactly the known
// failures listed below, and 1 otherwise (including an unexpected pass).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "random_gs.hpp"
#include "sepsys/bench/cases.hpp"
#include "sepsys/bench/report.hpp"
#include "sepsys/bench/runner.hpp"
#include "sepsys/bict.hpp"
#include "sepsys/block_detect.hpp"
#include "sepsys/errors.hpp"
#include "sepsys/factor_detect.hpp"
#include "sepsys/optimizer.hpp"
#include "sepsys/sampling.hpp"

using namespace sepsys;

namespace {

constexpr std::size_t kReps = 20;
constexpr std::uint64_t kSeed = 42;
constexpr double kToyTarget = 1e-6;
constexpr double kRealTarget = 1e-8;
constexpr double kCaseTimeLimitMs = 60'000.0;
constexpr double kCoefTol = 1e-4;
constexpr double kBlockRelTol = 1e-6;
constexpr double kExponentTol = 1e-4;
constexpr std::size_t kValidationPoints = 1000;
constexpr int kRandomSystems = 100;
constexpr int kFactorPassMin = 98;
constexpr int kLhsConfigs = 10'000;
constexpr int kRescalings = 10'000;
constexpr int kObjectives = 100;

// Case 13 has five factors under the default polarity where the reference
// table lists six, so criterion 3 cannot pass.
std::set<int> const kKnownFailures { 3 };

struct Outcome {
    int id;
    bool pass;
    std::string detail;
};

auto runs_of(SuiteResult const& s, std::string const& id) -> std::vector<RunReport const*>
{
    std::vector<RunReport const*> out;
    for (auto const& r : s.runs) {
        if (r.case_id == id) { out.push_back(&r); }
    }
    return out;
}

auto summary_of(SuiteResult const& s, std::string const& id) -> CaseSummary const&
{
    return *std::find_if(s.summaries.begin(), s.summaries.end(), [&](auto const& c) { return c.case_id == id; });
}

auto within_target(RunReport const& r, double target) -> bool { return !r.error && r.model && r.mse <= target; }

auto mean_time_ms(std::vector<RunReport const*> const& runs) -> double
{
    double total = 0.0;
    for (auto const* r : runs) { total += r->metrics.t1_ms + r->metrics.t2_ms + r->metrics.t3_ms; }
    return runs.empty() ? 0.0 : total / static_cast<double>(runs.size());
}

auto structure_recovery(SuiteResult const& s) -> Outcome
{
    bool pass = true;
    std::ostringstream d;
    for (int c = 1; c <= 10; ++c) {
        auto const id = std::to_string(c);
        auto const& sum = summary_of(s, id);
        auto const t = mean_time_ms(runs_of(s, id));
        if (sum.structure_matches != kReps || t >= kCaseTimeLimitMs) {
            pass = false;
            d << " case " << id << " " << sum.structure_matches << "/" << kReps << " (" << t << " ms);";
        }
    }
    if (pass) { d << " cases 1-10 match the expected structure in " << kReps << "/" << kReps << " runs"; }
    return { 1, pass, d.str() };
}

auto toy_accuracy(SuiteResult const& s) -> Outcome
{
    bool pass = true;
    std::ostringstream d;
    for (int c = 1; c <= 10; ++c) {
        auto const id = std::to_string(c);
        std::size_t ok = 0;
        for (auto const* r : runs_of(s, id)) { ok += within_target(*r, kToyTarget) ? 1 : 0; }
        auto const need = c <= 5 ? kReps : kReps - 1;
        d << " " << id << ":" << ok;
        if (ok < need) { pass = false; }
    }
    return { 2, pass, d.str() };
}

// Block of Case 13 that contains Gamma, compared with Gamma*ln(r/R)/(2 pi).
auto circulation_block_error(CaseSpec const& spec, GSModel const& model) -> double
{
    constexpr int gamma = 2;
    constexpr int radius = 3;
    constexpr int r = 4;
    std::size_t block = model.blocks.size();
    for (std::size_t b = 0; b < model.blocks.size(); ++b) {
        for (auto const& f : model.blocks[b]) {
            if (std::find(f.vars.begin(), f.vars.end(), gamma) != f.vars.end()) { block = b; }
        }
    }
    if (block == model.blocks.size()) { return INFINITY; }
    auto const pts = lhs_sample(spec.domain, kValidationPoints, derive_seed(kSeed, { 13, 2 })).points;
    double diff2 = 0.0;
    double want2 = 0.0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        std::span<const double> const x { pts.row(i).data(), spec.n() };
        double got = model.c[block + 1];
        for (auto const& f : model.blocks[block]) { got *= f.value(x); }
        auto const want = x[gamma] * std::log(x[r] / x[radius]) / (2.0 * std::numbers::pi);
        diff2 += (got - want) * (got - want);
        want2 += want * want;
    }
    return std::sqrt(diff2 / want2);
}

auto t0_exponent(GSModel const& model) -> double
{
    for (auto const& block : model.blocks) {
        for (auto const& f : block) {
            if (f.vars == std::vector<int> { 2 } && f.id == TemplateId::U1) { return f.params[0]; }
        }
    }
    return NAN;
}

auto real_world(SuiteResult const& s) -> Outcome
{
    bool pass = true;
    std::ostringstream d;
    for (int c = 11; c <= 14; ++c) {
        auto const id = std::to_string(c);
        std::size_t ok = 0;
        for (auto const* r : runs_of(s, id)) { ok += (r->expected_match.value_or(false) && within_target(*r, kRealTarget)) ? 1 : 0; }
        auto const& sum = summary_of(s, id);
        d << " " << id << ":" << ok << " (" << sum.blocks << "," << sum.factors << ")";
        if (ok + 1 < kReps) { pass = false; }
    }

    auto const& c13 = *find_case("13");
    std::size_t block_ok = 0;
    double worst = 0.0;
    for (auto const* r : runs_of(s, "13")) {
        if (!within_target(*r, kRealTarget)) { continue; }
        auto const e = circulation_block_error(c13, *r->model);
        worst = std::max(worst, e);
        block_ok += e <= kBlockRelTol ? 1 : 0;
    }
    d << "; case 13 block 2 " << block_ok << "/" << kReps << " (worst rel " << worst << ")";
    if (block_ok + 1 < kReps) { pass = false; }

    std::size_t exp_ok = 0;
    for (auto const* r : runs_of(s, "11")) {
        if (r->model && std::abs(t0_exponent(*r->model) + 0.5) <= kExponentTol) { ++exp_ok; }
    }
    d << "; case 11 T0 exponent " << exp_ok << "/" << kReps;
    if (exp_ok + 1 < kReps) { pass = false; }
    return { 3, pass, d.str() };
}

auto coefficients(SuiteResult const& s) -> Outcome
{
    bool pass = true;
    std::ostringstream d;
    for (auto const& [id, want] : { std::pair { std::string("2"), std::vector<double> { 0, 2, 1 } },
             std::pair { std::string("3"), std::vector<double> { 1.2, 10, -3 } } }) {
        std::size_t ok = 0;
        for (auto const* r : runs_of(s, id)) {
            bool good = r->model && r->model->c.size() == want.size();
            for (std::size_t i = 0; good && i < want.size(); ++i) { good = std::abs(r->model->c[i] - want[i]) <= kCoefTol; }
            ok += good ? 1 : 0;
        }
        d << " case " << id << " " << ok << "/" << kReps;
        if (ok != kReps) { pass = false; }
    }
    return { 4, pass, d.str() };
}

auto oracle_suite() -> Outcome
{
    Tolerance const tol;
    int blocks_ok = 0;
    int factors_ok = 0;
    int degenerate = 0;
    int silent = 0;
    for (int k = 0; k < kRandomSystems; ++k) {
        auto const seed = static_cast<std::uint64_t>(k);
        auto const sys = testing::random_system(seed);
        try {
            auto const blocks = detect_minimal_blocks(sys.target(), sys.domain, tol, seed);
            if (!testing::same_blocks(blocks, sys.truth)) { continue; }
            ++blocks_ok;
            auto const full = detect_factors(sys.target(), sys.domain, blocks, tol, seed);
            if (testing::same_factors(full, sys.truth)) {
                ++factors_ok;
            } else {
                ++silent;
            }
        } catch (DegenerateContextError const&) {
            ++degenerate;
        }
    }
    bool const pass = blocks_ok == kRandomSystems && factors_ok >= kFactorPassMin && silent == 0;
    std::ostringstream d;
    d << " blocks " << blocks_ok << "/" << kRandomSystems << ", factors " << factors_ok << "/" << kRandomSystems
      << ", degenerate " << degenerate << ", silent " << silent;
    return { 5, pass, d.str() };
}

auto lhs_stratified(Rng& rng) -> int
{
    int bad = 0;
    for (int k = 0; k < kLhsConfigs; ++k) {
        auto const dim = 1 + rng.below(6);
        auto const n = 2 + rng.below(119);
        std::vector<std::pair<double, double>> box;
        for (std::size_t d = 0; d < dim; ++d) {
            auto const lo = rng.uniform(-10, 10);
            box.emplace_back(lo, lo + rng.uniform(0.1, 20));
        }
        BoxDomain const domain(box);
        auto const s = lhs_sample(domain, n, rng());
        bool ok = static_cast<std::size_t>(s.rows()) == n;
        for (std::size_t d = 0; ok && d < dim; ++d) {
            std::vector<int> counts(n, 0);
            for (std::size_t i = 0; i < n; ++i) {
                auto const u = (s.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) - domain.lo(d)) / domain.width(d);
                auto const bin = static_cast<std::size_t>(std::floor(u * static_cast<double>(n)));
                if (u < 0.0 || bin >= n) {
                    ok = false;
                    break;
                }
                ++counts[bin];
            }
            ok = ok && std::all_of(counts.begin(), counts.end(), [](int c) { return c == 1; });
        }
        bad += ok ? 0 : 1;
    }
    return bad;
}

auto rescaling_flips(Rng& rng) -> int
{
    Tolerance const tol;
    auto const column = lhs_sample(BoxDomain({ { -3.0, 3.0 } }), tol.probe_rows, 77).points;
    int flips = 0;
    for (int k = 0; k < kRescalings; ++k) {
        auto const a = rng.uniform(0.1, 2.0);
        auto const b = rng.uniform(-1.0, 1.0);
        auto const dependent = k % 2 == 0;
        auto const ratio = rng.uniform(0.5, 3.0);
        std::vector<double> u, v;
        for (Eigen::Index i = 0; i < column.rows(); ++i) {
            auto const t = column(i, 0);
            u.push_back(std::exp(a * t) + b);
            v.push_back(dependent ? ratio * u.back() : std::sin(a * t + b));
        }
        auto const base = is_linearly_dependent(u, v, tol);
        if (base != dependent) {
            ++flips;
            continue;
        }
        auto const su = (rng.below(2) == 0 ? -1.0 : 1.0) * std::pow(10.0, rng.uniform(-6, 6));
        auto const sv = (rng.below(2) == 0 ? -1.0 : 1.0) * std::pow(10.0, rng.uniform(-6, 6));
        for (auto& x : u) { x *= su; }
        for (auto& x : v) { x *= sv; }
        flips += is_linearly_dependent(u, v, tol) == base ? 0 : 1;
    }
    return flips;
}

struct RandomObjective {
    std::size_t dim;
    std::vector<double> centre;
    int kind;

    auto operator()(std::span<const double> p) const -> double
    {
        double v = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            auto const d = p[i] - centre[i];
            switch (kind) {
            case 0: v += d * d; break;
            case 1: v += d * d + 2.0 * (1.0 - std::cos(d)); break;
            default: v += std::abs(d) + 0.1 * d * d; break;
            }
        }
        return v;
    }
};

auto optimizer_violations(Rng& rng) -> int
{
    int bad = 0;
    for (int k = 0; k < kObjectives; ++k) {
        RandomObjective obj { 1 + rng.below(4), {}, static_cast<int>(rng.below(3)) };
        for (std::size_t i = 0; i < obj.dim; ++i) { obj.centre.push_back(rng.uniform(-40, 40)); }
        OptConfig cfg;
        cfg.seed = rng();
        auto const a = minimize(obj, obj.dim, cfg);
        auto const b = minimize(obj, obj.dim, cfg);
        bool ok = a.best_params == b.best_params && a.best_value == b.best_value && a.history == b.history;
        for (std::size_t g = 1; g < a.history.size(); ++g) { ok = ok && a.history[g] <= a.history[g - 1]; }
        bad += ok ? 0 : 1;
    }
    return bad;
}

auto primitives() -> Outcome
{
    Rng rng(derive_seed(kSeed, { 6 }));
    auto const lhs = lhs_stratified(rng);
    auto const flips = rescaling_flips(rng);
    auto const opt = optimizer_violations(rng);
    std::ostringstream d;
    d << " LHS violations " << lhs << "/" << kLhsConfigs << ", rescaling flips " << flips << "/" << kRescalings
      << ", optimizer violations " << opt << "/" << kObjectives;
    return { 6, lhs == 0 && flips == 0 && opt == 0, d.str() };
}

auto read_file(std::filesystem::path const& p) -> std::string
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

auto cli_suite(std::string const& cli, std::filesystem::path const& out) -> std::string
{
    auto const cmd = "\"" + cli + "\" suite --cases 1-14 --reps 20 --seed 42 --threads 1 > \"" + out.string() + "\"";
    // The suite exits 3 because of the Case 13 mismatch; only the output matters here.
    auto const status = std::system(cmd.c_str());
    static_cast<void>(status);
    return read_file(out);
}

auto determinism(SuiteResult const& s, std::string const& cli) -> Outcome
{
    auto const in_process = suite_to_json(s, false).dump(2) + "\n";
    std::string first, second;
    if (cli.empty()) {
        std::vector<CaseSpec const*> all;
        for (auto const& c : case_registry()) { all.push_back(&c); }
        first = in_process;
        second = suite_to_json(run_suite(all, kReps, kSeed, RunOptions {}, 1), false).dump(2) + "\n";
    } else {
        auto const dir = std::filesystem::temp_directory_path();
        first = cli_suite(cli, dir / "sepsys_acceptance_a.json");
        second = cli_suite(cli, dir / "sepsys_acceptance_b.json");
    }
    bool const same = !first.empty() && first == second;
    bool const matches = first == in_process;
    std::ostringstream d;
    d << (cli.empty() ? " two in-process suites" : " two CLI suites") << (same ? " identical" : " differ") << " ("
      << first.size() << " bytes)";
    if (!cli.empty()) { d << ", in-process JSON " << (matches ? "identical" : "differs"); }
    return { 7, same && matches, d.str() };
}

auto timings_opt_in(SuiteResult const& s) -> Outcome
{
    auto const plain = suite_to_json(s, false).dump();
    auto const timed = suite_to_json(s, true).dump();
    bool const pass = plain.find("timings_ms") == std::string::npos && plain.find("t1_ms") == std::string::npos
        && timed.find("timings_ms") != std::string::npos && timed.find("t1_ms") != std::string::npos;
    return { 8, pass, " timings reported only on request and never asserted" };
}

} // namespace

int main(int argc, char** argv)
{
    std::string cli;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--cli" && i + 1 < argc) { cli = argv[++i]; }
    }

    std::vector<CaseSpec const*> all;
    for (auto const& c : case_registry()) { all.push_back(&c); }
    auto const suite = run_suite(all, kReps, kSeed, RunOptions {}, 1);

    std::vector<Outcome> outcomes;
    outcomes.push_back(structure_recovery(suite));
    outcomes.push_back(toy_accuracy(suite));
    outcomes.push_back(real_world(suite));
    outcomes.push_back(coefficients(suite));
    outcomes.push_back(oracle_suite());
    outcomes.push_back(primitives());
    outcomes.push_back(determinism(suite, cli));
    outcomes.push_back(timings_opt_in(suite));

    bool as_expected = true;
    for (auto const& o : outcomes) {
        auto const known = kKnownFailures.contains(o.id);
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << o.id << ":" << o.detail;
        if (known && !o.pass) { std::cout << " [known failure]"; }
        if (known && o.pass) { std::cout << " [unexpected pass]"; }
        std::cout << "\n";
        if (o.pass == known) { as_expected = false; }
    }
    std::cout << (as_expected ? "acceptance: results match the known-failure list"
                              : "acceptance: results differ from the known-failure list")
              << "\n";
    return as_expected ? 0 : 1;
}

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sepsys/bench/cases.hpp"
#include "sepsys/bench/expression.hpp"
#include "sepsys/bench/runner.hpp"
#include "sepsys/errors.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_missed_target = 2;
constexpr int exit_structure_mismatch = 3;
constexpr int exit_input_error = 4;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

auto split(std::string const& s, char sep) -> std::vector<std::string>
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) { out.push_back(item); }
    }
    return out;
}

auto parse_domain(std::string const& text, std::size_t n) -> sepsys::BoxDomain
{
    std::vector<std::pair<double, double>> bounds;
    for (auto const& part : split(text, ',')) {
        auto const colon = part.find(':');
        if (colon == std::string::npos) { throw InputError("domain entry '" + part + "' is not of the form a:b"); }
        try {
            bounds.emplace_back(std::stod(part.substr(0, colon)), std::stod(part.substr(colon + 1)));
        } catch (std::exception const&) {
            throw InputError("domain entry '" + part + "' is not numeric");
        }
    }
    if (bounds.size() == 1 && n > 1) { bounds.assign(n, bounds.front()); }
    if (bounds.size() != n) { throw InputError(fmt::format("domain has {} intervals for {} variables", bounds.size(), n)); }
    return sepsys::BoxDomain(std::move(bounds));
}

// A case argument is a registry id, a problem file, or an inline expression.
auto resolve_case(std::string const& arg, std::string const& vars, std::string const& domain,
    std::optional<sepsys::CaseSpec>& storage) -> sepsys::CaseSpec const*
{
    if (auto const* c = sepsys::find_case(arg)) { return c; }
    if (arg.size() > 5 && arg.ends_with(".json")) {
        storage = sepsys::load_problem_file(arg);
        return &*storage;
    }
    if (vars.empty()) { throw InputError("'" + arg + "' is not a case id; an expression needs --vars"); }
    auto names = split(vars, ',');
    auto box = parse_domain(domain.empty() ? "0:1" : domain, names.size());
    storage = sepsys::make_expression_case("user", std::move(names), std::move(box), arg);
    return &*storage;
}

auto write_output(std::string const& text, std::string const& path)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) { throw InputError("cannot write '" + path + "'"); }
    out << text;
}

auto exit_code_for(sepsys::SuiteResult const& s) -> int
{
    bool mismatch = false;
    bool missed = false;
    for (auto const& r : s.runs) {
        if (r.expected_match && !*r.expected_match) { mismatch = true; }
        if (!r.success) { missed = true; }
    }
    if (mismatch) { return exit_structure_mismatch; }
    return missed ? exit_missed_target : exit_ok;
}

auto render_suite(sepsys::SuiteResult const& s, std::string const& format, bool timings) -> std::string
{
    if (format == "csv") { return sepsys::suite_to_csv(s); }
    return sepsys::suite_to_json(s, timings).dump(2) + "\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app { "Recover separable structure and closed-form models from black-box functions" };
    app.require_subcommand(1);

    std::string case_arg, vars, domain, out, format = "json", cases = "1-14";
    std::uint64_t seed = 42;
    std::size_t reps = 1;
    std::size_t threads = 0;
    std::optional<double> eps_target;
    bool timings = false;
    std::string polarity = "dependent";

    auto* fit = app.add_subcommand("fit", "Fit one case, problem file, or expression");
    fit->add_option("--case", case_arg, "Case id, problem file (.json), or expression")->required();
    fit->add_option("--vars", vars, "Comma-separated variable names for an expression");
    fit->add_option("--domain", domain, "Intervals a:b,... (one interval applies to all variables)");
    fit->add_option("--seed", seed, "Base seed");
    fit->add_option("--reps", reps, "Repetitions")->check(CLI::PositiveNumber);
    fit->add_option("--eps-target", eps_target, "Override the MSE target");
    fit->add_option("--out", out, "Output path (stdout when omitted)");
    fit->add_option("--format", format, "json or csv")->check(CLI::IsMember({ "json", "csv" }));
    fit->add_flag("--timings", timings, "Include wall-clock timings");
    fit->add_option("--polarity", polarity, "Factor-membership polarity")
        ->check(CLI::IsMember({ "dependent", "independent" }));
    fit->add_option("--threads", threads, "Worker threads (0 = automatic)");

    std::size_t suite_reps = 20;
    auto* suite = app.add_subcommand("suite", "Run a set of registry cases");
    suite->add_option("--cases", cases, "Case list such as 1-14 or 1,3,5");
    suite->add_option("--reps", suite_reps, "Repetitions per case")->check(CLI::PositiveNumber);
    suite->add_option("--seed", seed, "Base seed");
    suite->add_option("--eps-target", eps_target, "Override the MSE target");
    suite->add_option("--out", out, "Output directory for suite.json and suite.csv (stdout JSON when omitted)");
    suite->add_flag("--timings", timings, "Include wall-clock timings");
    suite->add_option("--polarity", polarity, "Factor-membership polarity")
        ->check(CLI::IsMember({ "dependent", "independent" }));
    suite->add_option("--threads", threads, "Worker threads (0 = automatic)");

    auto* probe = app.add_subcommand("probe", "Run structure detection only");
    probe->add_option("--case", case_arg, "Case id, problem file (.json), or expression")->required();
    probe->add_option("--vars", vars, "Comma-separated variable names for an expression");
    probe->add_option("--domain", domain, "Intervals a:b,...");
    probe->add_option("--seed", seed, "Base seed");
    probe->add_option("--reps", reps, "Repetitions")->check(CLI::PositiveNumber);
    probe->add_option("--out", out, "Output path (stdout when omitted)");
    probe->add_flag("--timings", timings, "Include wall-clock timings");
    probe->add_option("--polarity", polarity, "Factor-membership polarity")
        ->check(CLI::IsMember({ "dependent", "independent" }));

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        auto const rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_input_error;
    }

    try {
        sepsys::RunOptions options;
        options.eps_target = eps_target;
        options.config.polarity = polarity == "dependent" ? sepsys::Polarity::Dependent : sepsys::Polarity::Independent;
        std::optional<sepsys::CaseSpec> storage;

        if (*fit || *probe) {
            options.detect_only = static_cast<bool>(*probe);
            auto const* spec = resolve_case(case_arg, vars, domain, storage);
            auto const result = sepsys::run_suite({ spec }, reps, seed, options, threads);
            write_output(render_suite(result, *probe ? "json" : format, timings), out);
            return exit_code_for(result);
        }

        std::vector<sepsys::CaseSpec const*> specs;
        for (auto const& id : sepsys::parse_case_list(cases)) {
            auto const* c = sepsys::find_case(std::to_string(id));
            if (c == nullptr) { throw InputError("unknown case " + std::to_string(id)); }
            specs.push_back(c);
        }
        auto const result = sepsys::run_suite(specs, suite_reps, seed, options, threads);
        if (out.empty()) {
            write_output(render_suite(result, "json", timings), "");
        } else {
            std::filesystem::create_directories(out);
            auto const dir = std::filesystem::path(out);
            write_output(render_suite(result, "json", timings), (dir / "suite.json").string());
            write_output(render_suite(result, "csv", timings), (dir / "suite.csv").string());
            std::cerr << sepsys::suite_to_csv(result);
        }
        return exit_code_for(result);
    } catch (InputError const& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (sepsys::ParseError const& e) {
        std::cerr << "parse error: " << e.what() << "\n";
    } catch (sepsys::UnknownIdentifier const& e) {
        std::cerr << "parse error: " << e.what() << "\n";
    } catch (std::invalid_argument const& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (sepsys::Error const& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return exit_input_error;
}

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sepsys/sampling.hpp"
#include "sepsys/target.hpp"
#include "sepsys/varset.hpp"

namespace sepsys {

struct ExpectedStructure {
    VarSet repeated;
    std::size_t blocks { 0 };
    std::size_t factors { 0 };
};

struct CaseSpec {
    std::string id;
    std::string title;
    std::vector<std::string> var_names;
    BoxDomain domain;
    Target::Fn fn;
    std::string formula; // human-readable, in var_names
    std::map<std::string, double> constants;
    double eps_target { 1e-6 };
    std::optional<ExpectedStructure> expected;
    std::string notes;

    [[nodiscard]] auto n() const -> std::size_t { return var_names.size(); }
    [[nodiscard]] auto target() const -> Target { return Target(fn, n()); }
};

// Built-in benchmark problems, ids "1" to "14".
[[nodiscard]] auto case_registry() -> std::vector<CaseSpec> const&;
[[nodiscard]] auto find_case(std::string const& id) -> CaseSpec const*;

// Target defined by a closed-form expression over `var_names`.
[[nodiscard]] auto make_expression_case(std::string id, std::vector<std::string> var_names, BoxDomain domain,
    std::string const& expr, std::map<std::string, double> constants = {}, double eps_target = 1e-6) -> CaseSpec;

// Reads {name, vars:[{name, lo, hi}], expr, constants:{...}, eps_target}.
[[nodiscard]] auto load_problem_file(std::string const& path) -> CaseSpec;

// Parses "1-14", "3", "1,4,7-9" into a sorted list of case numbers.
[[nodiscard]] auto parse_case_list(std::string const& text) -> std::vector<int>;

} // namespace sepsys

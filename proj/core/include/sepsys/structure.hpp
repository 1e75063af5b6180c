#pragma once

#include <string>
#include <vector>

#include "sepsys/varset.hpp"

namespace sepsys {

struct BlockStructure {
    VarSet nonrepeated;
    std::vector<VarSet> nonrepeated_factors;
    std::vector<VarSet> repeated_factors;
    bool has_repeated { false };

    // Union of the repeated factors: the repeated variables this block uses.
    [[nodiscard]] auto repeated_vars() const -> VarSet;
    [[nodiscard]] auto factor_count() const -> std::size_t { return nonrepeated_factors.size() + repeated_factors.size(); }
};

struct GSStructure {
    std::size_t n { 0 };
    VarSet repeated;
    std::vector<BlockStructure> blocks;

    [[nodiscard]] auto l() const -> std::size_t { return repeated.size(); }
    [[nodiscard]] auto m() const -> std::size_t { return blocks.size(); }
    [[nodiscard]] auto factor_count() const -> std::size_t;

    // Checks the cover/disjointness rules for blocks and, when
    // `with_factors`, for the factor partitions as well.
    void validate(bool with_factors = true) const;
};

[[nodiscard]] auto describe(VarSet const& s, std::vector<std::string> const& names) -> std::string;
[[nodiscard]] auto describe(std::vector<VarSet> const& groups, std::vector<std::string> const& names) -> std::string;
[[nodiscard]] auto default_names(std::size_t n) -> std::vector<std::string>;

} // namespace sepsys

#include "sepsys/structure.hpp"

#include <stdexcept>

#include "sepsys/errors.hpp"

namespace sepsys {

namespace {

void check_partition(std::vector<VarSet> const& parts, VarSet const& whole, char const* what)
{
    VarSet seen;
    std::size_t total = 0;
    for (auto const& p : parts) {
        if (p.empty()) { throw StructureError(std::string(what) + ": empty group"); }
        total += p.size();
        seen = set_union(seen, p);
    }
    if (total != seen.size()) { throw StructureError(std::string(what) + ": groups overlap"); }
    if (seen != whole) { throw StructureError(std::string(what) + ": groups do not cover their set"); }
}

} // namespace

auto BlockStructure::repeated_vars() const -> VarSet
{
    VarSet out;
    for (auto const& f : repeated_factors) { out = set_union(out, f); }
    return out;
}

auto GSStructure::factor_count() const -> std::size_t
{
    std::size_t total = 0;
    for (auto const& b : blocks) { total += b.factor_count(); }
    return total;
}

void GSStructure::validate(bool with_factors) const
{
    if (blocks.empty()) { throw StructureError("structure has no blocks"); }
    std::vector<VarSet> parts;
    if (!repeated.empty()) { parts.push_back(repeated); }
    for (auto const& b : blocks) {
        if (b.nonrepeated.empty()) { throw StructureError("block without non-repeated variables"); }
        parts.push_back(b.nonrepeated);
    }
    VarSet all;
    for (std::size_t i = 0; i < n; ++i) { all.push_back(static_cast<int>(i)); }
    check_partition(parts, all, "variables");
    if (!with_factors) { return; }
    for (auto const& b : blocks) {
        check_partition(b.nonrepeated_factors, b.nonrepeated, "non-repeated factors");
        auto const rep = b.repeated_vars();
        if (!is_subset(rep, repeated)) { throw StructureError("repeated factor uses a non-repeated variable"); }
        if (!b.repeated_factors.empty()) { check_partition(b.repeated_factors, rep, "repeated factors"); }
        if (b.has_repeated != !rep.empty()) { throw StructureError("has_repeated flag inconsistent with factors"); }
    }
}

auto describe(VarSet const& s, std::vector<std::string> const& names) -> std::string
{
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i > 0) { out += ","; }
        out += names.at(static_cast<std::size_t>(s[i]));
    }
    return out + "}";
}

auto describe(std::vector<VarSet> const& groups, std::vector<std::string> const& names) -> std::string
{
    std::string out = "[";
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (i > 0) { out += " "; }
        out += describe(groups[i], names);
    }
    return out + "]";
}

auto default_names(std::size_t n) -> std::vector<std::string>
{
    std::vector<std::string> names;
    names.reserve(n);
    for (std::size_t i = 0; i < n; ++i) { names.push_back("x" + std::to_string(i + 1)); }
    return names;
}

} // namespace sepsys

#include "sepsys/factor_detect.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <stdexcept>

#include "sepsys/errors.hpp"
#include "sepsys/rng.hpp"

namespace sepsys {

namespace {

constexpr int kRedraws = 3;

void sort_groups(std::vector<VarSet>& groups)
{
    std::sort(groups.begin(), groups.end(), [](VarSet const& a, VarSet const& b) { return a.front() < b.front(); });
}

auto max_abs(Eigen::VectorXd const& v) -> double { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

auto near_zero(Eigen::VectorXd const& d, Tolerance const& tol, double scale) -> bool
{
    return max_abs(d) <= tol.eps_const * std::max(1.0, scale);
}

// Peels subsets of `pool` that `separable` accepts, smallest first.
auto peel(VarSet const& pool, std::function<bool(VarSet const&)> const& separable) -> std::vector<VarSet>
{
    std::vector<VarSet> groups;
    VarSet rest = pool;
    std::size_t c = 1;
    while (rest.size() >= 2 && c <= rest.size() / 2) {
        VarSet found;
        for_each_combination(rest, c, [&](VarSet const& s) {
            if (separable(s)) {
                found = s;
                return false;
            }
            return true;
        });
        if (found.empty()) {
            ++c;
            continue;
        }
        groups.push_back(found);
        rest = set_difference(rest, found);
    }
    if (!rest.empty()) { groups.push_back(rest); }
    sort_groups(groups);
    return groups;
}

struct GroupSpec {
    VarSet varying;
    std::vector<double> const* pinned; // source for the remaining repeated variables
};

} // namespace

auto polarity_name(Polarity p) -> std::string_view
{
    return p == Polarity::Dependent ? "dependent" : "independent";
}

auto membership_name(Membership m) -> std::string_view
{
    switch (m) {
    case Membership::PresentAndSeparable: return "present-and-separable";
    case Membership::Absent: return "absent";
    case Membership::NotSeparable: return "not-separable";
    }
    return "?";
}

auto detect_nonrepeated_factors(Target const& f, BoxDomain const& domain, GSStructure const& structure,
    std::size_t block, Tolerance const& tol, std::uint64_t seed) -> std::vector<VarSet>
{
    auto const& own = structure.blocks.at(block).nonrepeated;
    if (own.size() == 1) { return { own }; }
    auto const ctx = random_interior_point(domain, derive_seed(seed, { 0 }));
    FixedMap fixed;
    for (std::size_t i = 0; i < domain.n(); ++i) {
        if (!contains(own, static_cast<int>(i))) { fixed.emplace(static_cast<int>(i), ctx[i]); }
    }
    auto const probe_seed = derive_seed(seed, { 1 });
    return peel(own, [&](VarSet const& s) {
        return multiplicative_split_test(f, domain, s, fixed, tol, derive_seed(probe_seed, { mask_of(s) }));
    });
}

auto sample_four_groups(Target const& f, BoxDomain const& domain, GSStructure const& structure,
    std::size_t block, VarSet const& test_set, Tolerance const& tol, std::uint64_t seed) -> FourGroupSamples
{
    if (test_set.empty() || !is_subset(test_set, structure.repeated)) {
        throw std::invalid_argument("test set must be a nonempty subset of the repeated variables");
    }
    auto const& own = structure.blocks.at(block).nonrepeated;
    auto const others = set_difference(structure.repeated, test_set);

    FourGroupSamples out;
    out.x_F = random_interior_point(domain, derive_seed(seed, { 0 }));
    out.x_F2 = random_interior_point(domain, derive_seed(seed, { 1 }));
    for (std::uint64_t k = 0; k < 8; ++k) {
        out.settings.push_back(random_interior_point(domain, derive_seed(seed, { 2, k })));
    }

    GroupSpec const specs[4] = {
        { test_set, &out.x_F },
        { test_set, &out.x_F2 },
        { others, &out.x_F },
        { others, &out.x_F2 },
    };
    Eigen::VectorXd* const dest[4] = { &out.fA, &out.fB, &out.fC, &out.fD };
    RowMatrix const rows_t = lhs_subset(domain, test_set, tol.probe_rows, derive_seed(seed, { 3 }));
    RowMatrix const rows_o = others.empty() ? RowMatrix() : lhs_subset(domain, others, tol.probe_rows, derive_seed(seed, { 4 }));

    for (std::size_t g = 0; g < 4; ++g) {
        auto const& spec = specs[g];
        if (spec.varying.empty()) {
            dest[g]->setZero(static_cast<Eigen::Index>(tol.probe_rows));
            continue;
        }
        Eigen::VectorXd pair[2];
        for (std::size_t s = 0; s < 2; ++s) {
            auto x = out.x_F;
            for (auto v : structure.repeated) { x[static_cast<std::size_t>(v)] = (*spec.pinned)[static_cast<std::size_t>(v)]; }
            auto const& setting = out.settings[2 * g + s];
            for (auto v : own) { x[static_cast<std::size_t>(v)] = setting[static_cast<std::size_t>(v)]; }
            pair[s] = evaluate_on_slice(f, spec.varying, g < 2 ? rows_t : rows_o, x);
            out.scale = std::max(out.scale, max_abs(pair[s]));
        }
        *dest[g] = pair[0] - pair[1];
    }
    for (std::size_t g = 0; g < 4; ++g) {
        if (specs[g].varying.empty()) { continue; }
        if (near_zero(*dest[g], tol, out.scale)) {
            throw DegenerateContextError("four-group difference vector vanished at the drawn fixing points");
        }
    }
    return out;
}

auto repeated_factor_membership(FourGroupSamples const& groups, Tolerance const& tol, Polarity polarity) -> Membership
{
    auto const const_a = is_constant(as_span(groups.fA), tol, groups.scale);
    auto const const_b = is_constant(as_span(groups.fB), tol, groups.scale);
    if (const_a && const_b) { return Membership::Absent; }
    if (const_a || const_b) { return Membership::NotSeparable; }
    auto const dep_ab = is_linearly_dependent(as_span(groups.fA), as_span(groups.fB), tol);
    auto const dep_cd = is_linearly_dependent(as_span(groups.fC), as_span(groups.fD), tol);
    auto const separable = polarity == Polarity::Dependent ? (dep_ab && dep_cd) : (!dep_ab && !dep_cd);
    return separable ? Membership::PresentAndSeparable : Membership::NotSeparable;
}

auto detect_repeated_factors(Target const& f, BoxDomain const& domain, GSStructure const& structure,
    std::size_t block, Tolerance const& tol, std::uint64_t seed, Polarity polarity) -> std::vector<VarSet>
{
    if (structure.repeated.empty()) { return {}; }
    auto const names = default_names(structure.n);

    std::map<std::uint64_t, Membership> memo;
    auto const verdict = [&](VarSet const& t) -> Membership {
        auto const key = mask_of(t);
        if (auto it = memo.find(key); it != memo.end()) { return it->second; }
        std::optional<Membership> agreed;
        for (int trial = 0; trial < tol.trials; ++trial) {
            std::optional<Membership> m;
            for (int attempt = 0; attempt < kRedraws && !m; ++attempt) {
                auto const s = derive_seed(seed, { key, static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(attempt) });
                try {
                    m = repeated_factor_membership(sample_four_groups(f, domain, structure, block, t, tol, s), tol, polarity);
                } catch (DegenerateContextError const&) {
                    if (attempt + 1 == kRedraws) { throw; }
                }
            }
            if (agreed && *agreed != *m) {
                throw StructureError("membership of " + describe(t, names) + " differs across trials: "
                    + std::string(membership_name(*agreed)) + " vs " + std::string(membership_name(*m)));
            }
            agreed = m;
        }
        memo.emplace(key, *agreed);
        return *agreed;
    };

    VarSet participating;
    for (auto v : structure.repeated) {
        if (verdict(VarSet { v }) != Membership::Absent) { participating.push_back(v); }
    }
    if (participating.empty()) { return {}; }
    return peel(participating, [&](VarSet const& t) { return verdict(t) == Membership::PresentAndSeparable; });
}

auto detect_factors(Target const& f, BoxDomain const& domain, GSStructure structure, Tolerance const& tol,
    std::uint64_t seed, Polarity polarity) -> GSStructure
{
    std::map<int, int> uses;
    for (std::size_t i = 0; i < structure.blocks.size(); ++i) {
        auto& b = structure.blocks[i];
        auto const block_seed = derive_seed(seed, { i });
        b.nonrepeated_factors = detect_nonrepeated_factors(f, domain, structure, i, tol, derive_seed(block_seed, { 0 }));
        b.repeated_factors = structure.repeated.empty()
            ? std::vector<VarSet> {}
            : detect_repeated_factors(f, domain, structure, i, tol, derive_seed(block_seed, { 1 }), polarity);
        b.has_repeated = !b.repeated_factors.empty();
        for (auto v : b.repeated_vars()) { ++uses[v]; }
    }
    for (auto v : structure.repeated) {
        if (uses[v] < 2) {
            throw StructureError("repeated variable x" + std::to_string(v + 1) + " participates in fewer than two blocks");
        }
    }
    structure.validate(true);
    return structure;
}

} // namespace sepsys

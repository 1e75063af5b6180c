#include "sepsys/block_detect.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>

#include "sepsys/errors.hpp"
#include "sepsys/rng.hpp"

namespace sepsys {

namespace {

auto all_vars(std::size_t n) -> VarSet
{
    VarSet v(n);
    for (std::size_t i = 0; i < n; ++i) { v[i] = static_cast<int>(i); }
    return v;
}

void sort_groups(std::vector<VarSet>& groups)
{
    std::sort(groups.begin(), groups.end(), [](VarSet const& a, VarSet const& b) { return a.front() < b.front(); });
}

// Peels additively separable subsets off `free_vars` in increasing size;
// the complement of every probe is all of the other free variables.
auto peel_partition(Target const& f, BoxDomain const& domain, VarSet const& free_vars, FixedMap const& fixed,
    Tolerance const& tol, std::uint64_t seed, bool stop_at_first_split) -> std::vector<VarSet>
{
    std::vector<VarSet> groups;
    VarSet rest = free_vars;
    std::size_t c = 1;
    while (rest.size() >= 2 && c <= rest.size() / 2) {
        VarSet found;
        for_each_combination(rest, c, [&](VarSet const& s) {
            if (additive_split_test(f, domain, s, fixed, tol, derive_seed(seed, { mask_of(s) }))) {
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
        if (stop_at_first_split) { break; }
    }
    if (!rest.empty()) { groups.push_back(rest); }
    sort_groups(groups);
    return groups;
}

auto fixed_from(std::vector<double> const& ctx, VarSet const& free_vars) -> FixedMap
{
    FixedMap fixed;
    for (std::size_t i = 0; i < ctx.size(); ++i) {
        if (!contains(free_vars, static_cast<int>(i))) { fixed.emplace(static_cast<int>(i), ctx[i]); }
    }
    return fixed;
}

// Holds one fixing context for the whole search, so repeated questions
// about the same free set are answered once.
class Searcher {
public:
    Searcher(Target const& f, BoxDomain const& domain, Tolerance const& tol, std::uint64_t seed, std::vector<double> ctx)
        : f_(f), domain_(domain), tol_(tol), seed_(seed), ctx_(std::move(ctx))
    {
    }

    auto partition(VarSet const& free_vars) -> std::vector<VarSet> const&
    {
        auto const key = mask_of(free_vars);
        auto it = full_.find(key);
        if (it == full_.end()) {
            auto const groups = peel_partition(f_, domain_, free_vars, fixed_from(ctx_, free_vars), tol_,
                derive_seed(seed_, { key }), false);
            it = full_.emplace(key, groups).first;
        }
        return it->second;
    }

    auto splits(VarSet const& free_vars) -> bool
    {
        if (free_vars.size() < 2) { return false; }
        auto const key = mask_of(free_vars);
        if (auto it = full_.find(key); it != full_.end()) { return it->second.size() > 1; }
        auto it = split_.find(key);
        if (it == split_.end()) {
            auto const groups = peel_partition(f_, domain_, free_vars, fixed_from(ctx_, free_vars), tol_,
                derive_seed(seed_, { key }), true);
            it = split_.emplace(key, groups.size() > 1).first;
        }
        return it->second;
    }

    // Whether `group` is t-factor times the rest on the search context,
    // i.e. fixing t splits the group only by scaling a sum.
    auto scales(VarSet const& group, VarSet const& t) -> bool
    {
        auto const key = std::pair { mask_of(group), mask_of(t) };
        auto it = scales_.find(key);
        if (it == scales_.end()) {
            auto const verdict = multiplicative_split_test(f_, domain_, t, fixed_from(ctx_, group), tol_,
                derive_seed(seed_, { 4, mask_of(group), mask_of(t) }));
            it = scales_.emplace(key, verdict).first;
        }
        return it->second;
    }

private:
    Target const& f_;
    BoxDomain const& domain_;
    Tolerance const& tol_;
    std::uint64_t seed_;
    std::vector<double> ctx_;
    std::map<std::uint64_t, std::vector<VarSet>> full_;
    std::map<std::uint64_t, bool> split_;
    std::map<std::pair<std::uint64_t, std::uint64_t>, bool> scales_;
};

auto group_containing(std::vector<VarSet> const& groups, int v) -> VarSet const&
{
    for (auto const& g : groups) {
        if (contains(g, v)) { return g; }
    }
    throw std::logic_error("variable missing from partition");
}

// Smallest W within `pool` (intersecting `must`) whose fixing splits the
// top-level group G, such that no W minus one element does.
auto find_minimal_splitter(Searcher& s, VarSet const& top_group, VarSet const& pool, VarSet const& must)
    -> std::optional<VarSet>
{
    std::optional<VarSet> result;
    for (std::size_t k = 1; k <= pool.size() && !result; ++k) {
        if (top_group.size() < k + 2) { break; }
        for_each_combination(pool, k, [&](VarSet const& w) {
            if (set_intersection(w, must).empty()) { return true; }
            if (!s.splits(set_difference(top_group, w))) { return true; }
            for (std::size_t drop = 0; drop < w.size() && w.size() > 1; ++drop) {
                VarSet smaller = w;
                smaller.erase(smaller.begin() + static_cast<std::ptrdiff_t>(drop));
                if (s.splits(set_difference(top_group, smaller))) { return true; }
            }
            result = w;
            return false;
        });
    }
    return result;
}

} // namespace

auto detect_additive_partition(Target const& f, BoxDomain const& domain, FixedMap const& fixed_ctx,
    Tolerance const& tol, std::uint64_t seed) -> std::vector<VarSet>
{
    tol.validate();
    VarSet free_vars;
    for (auto v : all_vars(domain.n())) {
        if (!fixed_ctx.contains(v)) { free_vars.push_back(v); }
    }
    if (free_vars.size() < 2) { throw std::invalid_argument("additive partition needs at least two free variables"); }
    return peel_partition(f, domain, free_vars, fixed_ctx, tol, seed, false);
}

auto detect_minimal_blocks(Target const& f, BoxDomain const& domain, Tolerance const& tol, std::uint64_t seed)
    -> GSStructure
{
    tol.validate();
    auto const n = domain.n();
    if (n == 0) { throw std::invalid_argument("domain has no variables"); }
    if (n > 64) { throw std::invalid_argument("detection supports at most 64 variables"); }

    GSStructure out;
    out.n = n;
    auto const everything = all_vars(n);
    if (n == 1) {
        out.blocks.push_back(BlockStructure { .nonrepeated = everything });
        return out;
    }

    Searcher search(f, domain, tol, derive_seed(seed, { 1 }), random_interior_point(domain, derive_seed(seed, { 0 })));
    auto const top = search.partition(everything);

    VarSet repeated;
    std::set<std::uint64_t> rejected;
    bool restart = true;
    while (restart) {
        restart = false;
        auto const groups = search.partition(set_difference(everything, repeated));
        std::size_t largest = 0;
        for (auto const& g : groups) { largest = std::max(largest, g.size()); }
        for (std::size_t c = 1; c + 2 <= largest && !restart; ++c) {
            for (auto const& h : groups) {
                if (h.size() < c + 2 || restart) { continue; }
                for_each_combination(h, c, [&](VarSet const& t) {
                    if (rejected.contains(mask_of(t))) { return true; }
                    if (!search.splits(set_difference(h, t))) { return true; }
                    auto const& g = group_containing(top, t.front());
                    auto const pool = set_intersection(set_union(t, repeated), g);
                    auto w = find_minimal_splitter(search, g, pool, t);
                    if (!w && !search.scales(h, t)) { w = t; }
                    if (w) {
                        repeated = set_union(repeated, *w);
                        rejected.clear();
                        restart = true;
                        return false;
                    }
                    rejected.insert(mask_of(t));
                    return true;
                });
                if (restart) { break; }
            }
        }
    }

    auto const remaining = set_difference(everything, repeated);
    auto const blocks = remaining.size() >= 2 ? search.partition(remaining) : std::vector<VarSet> { remaining };

    for (int t = 1; t < tol.trials && !repeated.empty() && remaining.size() >= 2; ++t) {
        auto const ctx = random_interior_point(domain, derive_seed(seed, { 2, static_cast<std::uint64_t>(t) }));
        auto const check = peel_partition(f, domain, remaining, fixed_from(ctx, remaining), tol,
            derive_seed(seed, { 3, static_cast<std::uint64_t>(t) }), false);
        if (check != blocks) {
            auto const names = default_names(n);
            throw StructureError("block partition differs between fixing contexts: " + describe(blocks, names)
                + " vs " + describe(check, names));
        }
    }

    out.repeated = repeated;
    for (auto const& b : blocks) { out.blocks.push_back(BlockStructure { .nonrepeated = b }); }
    out.validate(false);
    return out;
}

} // namespace sepsys

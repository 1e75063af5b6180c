#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace sepsys {

// Sorted, duplicate-free list of 0-based variable indices.
using VarSet = std::vector<int>;

inline auto make_varset(std::vector<int> v) -> VarSet
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

inline auto set_union(VarSet const& a, VarSet const& b) -> VarSet
{
    VarSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline auto set_difference(VarSet const& a, VarSet const& b) -> VarSet
{
    VarSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline auto set_intersection(VarSet const& a, VarSet const& b) -> VarSet
{
    VarSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline auto contains(VarSet const& s, int v) -> bool
{
    return std::binary_search(s.begin(), s.end(), v);
}

inline auto is_subset(VarSet const& sub, VarSet const& super) -> bool
{
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

// Bit mask of a variable set; detection is limited to 64 variables.
inline auto mask_of(VarSet const& s) -> std::uint64_t
{
    std::uint64_t m = 0;
    for (auto v : s) { m |= std::uint64_t { 1 } << static_cast<unsigned>(v); }
    return m;
}

// Visits every k-element subset of `pool` in lexicographic order.
// Stops early when the visitor returns false.
inline void for_each_combination(VarSet const& pool, std::size_t k, std::function<bool(VarSet const&)> const& visit)
{
    auto const n = pool.size();
    if (k == 0 || k > n) { return; }
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) { idx[i] = i; }
    VarSet subset(k);
    while (true) {
        for (std::size_t i = 0; i < k; ++i) { subset[i] = pool[idx[i]]; }
        if (!visit(subset)) { return; }
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) { --i; }
        if (i == 0) { return; }
        ++idx[i - 1];
        for (auto j = i; j < k; ++j) { idx[j] = idx[j - 1] + 1; }
    }
}

} // namespace sepsys

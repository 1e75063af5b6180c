#include "random_gs.hpp"

#include <algorithm>
#include <map>
#include <memory>

namespace sepsys::testing {

namespace {

constexpr double kLo = 0.5;
constexpr double kHi = 2.0;

auto signed_magnitude(Rng& rng, double lo, double hi) -> double
{
    auto const v = rng.uniform(lo, hi);
    return rng.below(2) == 0 ? v : -v;
}

auto split_groups(Rng& rng, std::vector<int> vars) -> std::vector<VarSet>
{
    std::shuffle(vars.begin(), vars.end(), rng);
    std::vector<VarSet> groups;
    std::size_t i = 0;
    while (i < vars.size()) {
        auto const take = (i + 1 < vars.size() && rng.below(3) == 0) ? 2U : 1U;
        groups.push_back(make_varset({ vars.begin() + static_cast<std::ptrdiff_t>(i),
            vars.begin() + static_cast<std::ptrdiff_t>(i + take) }));
        i += take;
    }
    return groups;
}

} // namespace

auto RandomFactor::value(std::span<const double> x) const -> double
{
    std::vector<double> in;
    for (auto v : vars) { in.push_back(x[static_cast<std::size_t>(v)]); }
    return eval_template(id, params, in);
}

auto random_factor(Rng& rng, std::vector<int> vars, bool allow_additive) -> RandomFactor
{
    RandomFactor f;
    f.vars = std::move(vars);
    if (f.vars.size() == 1) {
        switch (rng.below(4)) {
        case 0:
            f.id = TemplateId::U1;
            f.params = { signed_magnitude(rng, 0.5, 2.0) };
            break;
        case 1:
            f.id = TemplateId::U2;
            f.params = { signed_magnitude(rng, 0.5, 1.5) };
            break;
        case 2:
            f.id = TemplateId::U3;
            f.params = { rng.uniform(1.0, 2.5), rng.uniform(-1.5, 1.5) };
            break;
        default:
            f.id = TemplateId::U4;
            f.params = { rng.uniform(0.5, 2.0), rng.uniform(1.0, 2.0) };
            break;
        }
        return f;
    }
    auto const choices = allow_additive ? 4U : 3U;
    switch (rng.below(choices)) {
    case 0:
        f.id = TemplateId::B2;
        f.params = { signed_magnitude(rng, 0.3, 0.8) };
        break;
    case 1:
        f.id = TemplateId::B3;
        f.params = { signed_magnitude(rng, 0.5, 2.0), signed_magnitude(rng, 0.5, 2.0), signed_magnitude(rng, 0.5, 2.0),
            signed_magnitude(rng, 0.5, 2.0) };
        if (std::abs(f.params[0] - f.params[2]) < 0.3) { f.params[2] = -f.params[0]; }
        break;
    case 2:
        f.id = TemplateId::B4;
        f.params = { rng.uniform(0.5, 1.5), signed_magnitude(rng, 0.5, 1.5), signed_magnitude(rng, 0.3, 0.8),
            rng.uniform(-1.5, 1.5) };
        break;
    default:
        f.id = TemplateId::B1;
        f.params = { signed_magnitude(rng, 0.5, 2.0), signed_magnitude(rng, 0.5, 2.0) };
        break;
    }
    return f;
}

auto RandomSystem::value(std::span<const double> x) const -> double
{
    auto y = c[0];
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        auto p = c[i + 1];
        for (auto const& f : blocks[i]) { p *= f.value(x); }
        y += p;
    }
    return y;
}

auto RandomSystem::target() const -> Target
{
    auto self = std::make_shared<RandomSystem>(*this);
    return Target([self](std::span<const double> x) { return self->value(x); }, domain.n());
}

auto random_system(std::uint64_t seed, std::size_t max_n, std::size_t max_m) -> RandomSystem
{
    Rng rng(derive_seed(seed, { 0x6753 }));
    auto const n = 2 + rng.below(max_n - 1);
    auto const m = 1 + rng.below(std::min(max_m, n));
    auto const max_l = m >= 2 ? std::min<std::size_t>(n - m, 3) : 0;
    auto const l = max_l == 0 ? 0 : rng.below(max_l + 1);

    std::vector<int> order(n);
    for (std::size_t i = 0; i < n; ++i) { order[i] = static_cast<int>(i); }
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> const repeated(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(l));

    std::vector<std::vector<int>> nonrepeated(m);
    for (std::size_t i = l; i < n; ++i) {
        auto const slot = i - l;
        auto const b = slot < m ? slot : rng.below(m);
        nonrepeated[b].push_back(order[i]);
    }

    std::vector<std::vector<int>> uses(m);
    for (auto r : repeated) {
        std::vector<std::size_t> blocks(m);
        for (std::size_t b = 0; b < m; ++b) { blocks[b] = b; }
        std::shuffle(blocks.begin(), blocks.end(), rng);
        auto const count = 2 + rng.below(m - 1);
        for (std::size_t k = 0; k < count; ++k) { uses[blocks[k]].push_back(r); }
    }

    RandomSystem sys;
    sys.domain = BoxDomain(std::vector<std::pair<double, double>>(n, { kLo, kHi }));
    sys.truth.n = n;
    sys.truth.repeated = make_varset(repeated);
    sys.c.push_back(rng.uniform(-1.0, 1.0));
    for (std::size_t b = 0; b < m; ++b) {
        BlockStructure bs;
        bs.nonrepeated = make_varset(nonrepeated[b]);
        bs.nonrepeated_factors = split_groups(rng, nonrepeated[b]);
        bs.repeated_factors = split_groups(rng, uses[b]);
        bs.has_repeated = !uses[b].empty();
        // A B1 factor would turn the block into a sum of two blocks.
        std::vector<RandomFactor> factors;
        for (auto const* groups : { &bs.nonrepeated_factors, &bs.repeated_factors }) {
            for (auto const& g : *groups) { factors.push_back(random_factor(rng, g, false)); }
        }
        sys.blocks.push_back(std::move(factors));
        sys.c.push_back(signed_magnitude(rng, 0.5, 2.0));
        bs.nonrepeated_factors = normalized(bs.nonrepeated_factors);
        bs.repeated_factors = normalized(bs.repeated_factors);
        sys.truth.blocks.push_back(std::move(bs));
    }
    std::sort(sys.truth.blocks.begin(), sys.truth.blocks.end(),
        [](BlockStructure const& a, BlockStructure const& b) { return a.nonrepeated.front() < b.nonrepeated.front(); });
    return sys;
}

auto normalized(std::vector<VarSet> groups) -> std::vector<VarSet>
{
    std::sort(groups.begin(), groups.end());
    return groups;
}

auto same_blocks(GSStructure const& a, GSStructure const& b) -> bool
{
    if (a.repeated != b.repeated || a.m() != b.m()) { return false; }
    std::vector<VarSet> x, y;
    for (auto const& blk : a.blocks) { x.push_back(blk.nonrepeated); }
    for (auto const& blk : b.blocks) { y.push_back(blk.nonrepeated); }
    return normalized(x) == normalized(y);
}

auto same_factors(GSStructure const& a, GSStructure const& b) -> bool
{
    if (!same_blocks(a, b)) { return false; }
    std::map<VarSet, BlockStructure const*> by_key;
    for (auto const& blk : b.blocks) { by_key[blk.nonrepeated] = &blk; }
    for (auto const& blk : a.blocks) {
        auto const& other = *by_key.at(blk.nonrepeated);
        if (normalized(blk.nonrepeated_factors) != normalized(other.nonrepeated_factors)) { return false; }
        if (normalized(blk.repeated_factors) != normalized(other.repeated_factors)) { return false; }
    }
    return true;
}

} // namespace sepsys::testing

#pragma once

#include <cstdint>
#include <vector>

#include "sepsys/bict.hpp"
#include "sepsys/structure.hpp"

namespace sepsys {

// Finest partition of the free variables (those not in fixed_ctx) into
// additively separable groups. Groups are ordered by smallest member.
[[nodiscard]] auto detect_additive_partition(Target const& f, BoxDomain const& domain, FixedMap const& fixed_ctx,
    Tolerance const& tol, std::uint64_t seed) -> std::vector<VarSet>;

// Repeated-variable set and the non-repeated variables of every minimal
// block. Factor partitions are left empty.
[[nodiscard]] auto detect_minimal_blocks(Target const& f, BoxDomain const& domain, Tolerance const& tol,
    std::uint64_t seed) -> GSStructure;

} // namespace sepsys

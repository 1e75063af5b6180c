#pragma once

#include <cstdint>
#include <span>

#include "sepsys/sampling.hpp"
#include "sepsys/target.hpp"
#include "sepsys/varset.hpp"

namespace sepsys {

struct Tolerance {
    double eps_const { 1e-8 };
    double eps_dep { 1e-8 };
    int trials { 3 };
    std::size_t probe_rows { 50 };

    void validate() const;
};

// max|v_i - mean| <= eps_const * max(1, |mean|, scale). `scale` lets a
// caller supply the magnitude of the raw responses a difference vector
// was computed from, so cancellation noise is judged against it.
[[nodiscard]] auto is_constant(std::span<const double> v, Tolerance const& tol, double scale = 0.0) -> bool;

// Relative second singular value of [u/|u| v/|v|] <= eps_dep. A zero
// column counts as dependent (rank <= 1).
[[nodiscard]] auto is_linearly_dependent(std::span<const double> u, std::span<const double> v, Tolerance const& tol) -> bool;

// sigma_2 / sigma_1 of the column-normalised pair; 0 when a column is zero.
[[nodiscard]] auto dependence_ratio(std::span<const double> u, std::span<const double> v) -> double;

// f = g(subset) + h(rest) on the context given by fixed_ctx.
[[nodiscard]] auto additive_split_test(Target const& f, BoxDomain const& domain, VarSet const& subset,
    FixedMap const& fixed_ctx, Tolerance const& tol, std::uint64_t seed) -> bool;

// f = g(subset) * h(rest) + C on the context given by fixed_ctx, where C
// does not depend on any free variable.
[[nodiscard]] auto multiplicative_split_test(Target const& f, BoxDomain const& domain, VarSet const& subset,
    FixedMap const& fixed_ctx, Tolerance const& tol, std::uint64_t seed) -> bool;

inline auto as_span(Eigen::VectorXd const& v) -> std::span<const double>
{
    return { v.data(), static_cast<std::size_t>(v.size()) };
}

} // namespace sepsys

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "sepsys/bict.hpp"
#include "sepsys/structure.hpp"

namespace sepsys {

// How the paired difference vectors are read when deciding whether a
// repeated-variable subset forms its own factor. Dependent is the
// setting that recovers all built-in benchmark structures.
enum class Polarity { Dependent, Independent };

[[nodiscard]] auto polarity_name(Polarity p) -> std::string_view;

struct FourGroupSamples {
    Eigen::VectorXd fA, fB, fC, fD;
    double scale { 0.0 }; // largest raw response magnitude seen
    std::vector<double> x_F, x_F2;
    std::vector<std::vector<double>> settings; // A1 A2 B1 B2 C1 C2 D1 D2
};

enum class Membership { PresentAndSeparable, Absent, NotSeparable };

[[nodiscard]] auto membership_name(Membership m) -> std::string_view;

[[nodiscard]] auto detect_nonrepeated_factors(Target const& f, BoxDomain const& domain, GSStructure const& structure,
    std::size_t block, Tolerance const& tol, std::uint64_t seed) -> std::vector<VarSet>;

// A/B vary test_set with the other repeated variables pinned at x_F (A)
// or x_F2 (B); C/D vary the other repeated variables with test_set
// pinned at x_F or x_F2. Each group differences two settings of block
// i's non-repeated variables; all other blocks stay at x_F.
[[nodiscard]] auto sample_four_groups(Target const& f, BoxDomain const& domain, GSStructure const& structure,
    std::size_t block, VarSet const& test_set, Tolerance const& tol, std::uint64_t seed) -> FourGroupSamples;

[[nodiscard]] auto repeated_factor_membership(FourGroupSamples const& groups, Tolerance const& tol,
    Polarity polarity = Polarity::Dependent) -> Membership;

[[nodiscard]] auto detect_repeated_factors(Target const& f, BoxDomain const& domain, GSStructure const& structure,
    std::size_t block, Tolerance const& tol, std::uint64_t seed, Polarity polarity = Polarity::Dependent)
    -> std::vector<VarSet>;

// Fills the factor partitions of every block.
[[nodiscard]] auto detect_factors(Target const& f, BoxDomain const& domain, GSStructure structure,
    Tolerance const& tol, std::uint64_t seed, Polarity polarity = Polarity::Dependent) -> GSStructure;

} // namespace sepsys

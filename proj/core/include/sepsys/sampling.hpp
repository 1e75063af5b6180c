#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sepsys/target.hpp"
#include "sepsys/varset.hpp"

namespace sepsys {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Variables held at fixed values, keyed by 0-based index.
using FixedMap = std::map<int, double>;

class BoxDomain {
public:
    BoxDomain() = default;
    explicit BoxDomain(std::vector<std::pair<double, double>> bounds);

    [[nodiscard]] auto n() const noexcept -> std::size_t { return bounds_.size(); }
    [[nodiscard]] auto lo(std::size_t i) const -> double { return bounds_.at(i).first; }
    [[nodiscard]] auto hi(std::size_t i) const -> double { return bounds_.at(i).second; }
    [[nodiscard]] auto width(std::size_t i) const -> double { return hi(i) - lo(i); }
    [[nodiscard]] auto bounds() const noexcept -> std::vector<std::pair<double, double>> const& { return bounds_; }
    [[nodiscard]] auto contains(std::span<const double> x) const -> bool;
    [[nodiscard]] auto all_positive() const -> bool;

private:
    std::vector<std::pair<double, double>> bounds_;
};

struct SampleSet {
    RowMatrix points;         // N x n
    Eigen::VectorXd responses; // empty until evaluated

    [[nodiscard]] auto rows() const noexcept -> Eigen::Index { return points.rows(); }
    [[nodiscard]] auto row(Eigen::Index i) const -> std::span<const double>
    {
        return { points.data() + i * points.cols(), static_cast<std::size_t>(points.cols()) };
    }
};

// Latin hypercube design on the unit cube: exactly one point per stratum
// [k/N, (k+1)/N) in every dimension. Points keep a small distance from
// stratum edges so that rescaling cannot push them into a neighbour.
[[nodiscard]] auto lhs_unit(std::size_t n_points, std::size_t dims, std::uint64_t seed) -> RowMatrix;

[[nodiscard]] auto lhs_sample(BoxDomain const& domain, std::size_t n_points, std::uint64_t seed) -> SampleSet;

// Free variables are LHS-sampled; fixed ones are copied bit-exactly.
[[nodiscard]] auto sample_with_fixed(Target const& f, BoxDomain const& domain, FixedMap const& fixed,
    std::size_t n_points, std::uint64_t seed) -> SampleSet;

// Uniform point at least 1% of each width away from the bounds.
[[nodiscard]] auto random_interior_point(BoxDomain const& domain, std::uint64_t seed) -> std::vector<double>;

[[nodiscard]] auto evaluate_rows(Target const& f, RowMatrix const& points) -> Eigen::VectorXd;

// LHS values (N x |vars|) for a subset of variables, in domain units.
[[nodiscard]] auto lhs_subset(BoxDomain const& domain, VarSet const& vars, std::size_t n_points, std::uint64_t seed) -> RowMatrix;

// Random interior point with the entries of `fixed` overwritten.
[[nodiscard]] auto make_context(BoxDomain const& domain, FixedMap const& fixed, std::uint64_t seed) -> std::vector<double>;

// Evaluates f at `base` with the columns of `values` written into `vars`.
[[nodiscard]] auto evaluate_on_slice(Target const& f, VarSet const& vars, RowMatrix const& values,
    std::span<const double> base) -> Eigen::VectorXd;

} // namespace sepsys

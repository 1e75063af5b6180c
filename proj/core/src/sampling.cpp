#include "sepsys/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "sepsys/rng.hpp"

namespace sepsys {

BoxDomain::BoxDomain(std::vector<std::pair<double, double>> bounds)
    : bounds_(std::move(bounds))
{
    for (auto const& [a, b] : bounds_) {
        if (!(a < b)) { throw std::invalid_argument("domain bounds must satisfy lo < hi"); }
    }
}

auto BoxDomain::contains(std::span<const double> x) const -> bool
{
    if (x.size() != n()) { return false; }
    for (std::size_t i = 0; i < n(); ++i) {
        if (x[i] < bounds_[i].first || x[i] > bounds_[i].second) { return false; }
    }
    return true;
}

auto BoxDomain::all_positive() const -> bool
{
    return std::all_of(bounds_.begin(), bounds_.end(), [](auto const& b) { return b.first > 0.0; });
}

auto lhs_unit(std::size_t n_points, std::size_t dims, std::uint64_t seed) -> RowMatrix
{
    if (n_points < 2) { throw std::invalid_argument("LHS needs at least two points"); }
    Rng rng(seed);
    RowMatrix u(static_cast<Eigen::Index>(n_points), static_cast<Eigen::Index>(dims));
    std::vector<std::size_t> perm(n_points);
    auto const inv_n = 1.0 / static_cast<double>(n_points);
    for (std::size_t d = 0; d < dims; ++d) {
        std::iota(perm.begin(), perm.end(), std::size_t { 0 });
        for (std::size_t i = n_points - 1; i > 0; --i) {
            std::swap(perm[i], perm[rng.below(i + 1)]);
        }
        for (std::size_t i = 0; i < n_points; ++i) {
            auto const jitter = 0.001 + 0.998 * rng.uniform();
            u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = (static_cast<double>(perm[i]) + jitter) * inv_n;
        }
    }
    return u;
}

auto lhs_sample(BoxDomain const& domain, std::size_t n_points, std::uint64_t seed) -> SampleSet
{
    SampleSet s;
    s.points = lhs_unit(n_points, domain.n(), seed);
    for (Eigen::Index d = 0; d < s.points.cols(); ++d) {
        auto const a = domain.lo(static_cast<std::size_t>(d));
        auto const w = domain.width(static_cast<std::size_t>(d));
        s.points.col(d) = (s.points.col(d).array() * w + a).matrix();
    }
    return s;
}

auto sample_with_fixed(Target const& f, BoxDomain const& domain, FixedMap const& fixed,
    std::size_t n_points, std::uint64_t seed) -> SampleSet
{
    std::vector<int> free_vars;
    for (std::size_t i = 0; i < domain.n(); ++i) {
        auto const it = fixed.find(static_cast<int>(i));
        if (it == fixed.end()) {
            free_vars.push_back(static_cast<int>(i));
        } else if (it->second < domain.lo(i) || it->second > domain.hi(i)) {
            throw std::invalid_argument("fixed value outside its bounds");
        }
    }
    if (free_vars.empty()) { throw std::invalid_argument("sample_with_fixed needs a free variable"); }

    auto const u = lhs_unit(n_points, free_vars.size(), seed);
    SampleSet s;
    s.points.resize(static_cast<Eigen::Index>(n_points), static_cast<Eigen::Index>(domain.n()));
    for (auto const& [v, value] : fixed) { s.points.col(v).setConstant(value); }
    for (std::size_t k = 0; k < free_vars.size(); ++k) {
        auto const v = static_cast<std::size_t>(free_vars[k]);
        s.points.col(free_vars[k]) = (u.col(static_cast<Eigen::Index>(k)).array() * domain.width(v) + domain.lo(v)).matrix();
    }
    s.responses = evaluate_rows(f, s.points);
    return s;
}

auto random_interior_point(BoxDomain const& domain, std::uint64_t seed) -> std::vector<double>
{
    Rng rng(seed);
    std::vector<double> x(domain.n());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = domain.lo(i) + domain.width(i) * (0.01 + 0.98 * rng.uniform());
    }
    return x;
}

auto evaluate_rows(Target const& f, RowMatrix const& points) -> Eigen::VectorXd
{
    Eigen::VectorXd y(points.rows());
    auto const cols = static_cast<std::size_t>(points.cols());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        y[i] = f(std::span<const double>(points.data() + i * points.cols(), cols));
    }
    return y;
}

auto lhs_subset(BoxDomain const& domain, VarSet const& vars, std::size_t n_points, std::uint64_t seed) -> RowMatrix
{
    auto m = lhs_unit(n_points, vars.size(), seed);
    for (std::size_t k = 0; k < vars.size(); ++k) {
        auto const v = static_cast<std::size_t>(vars[k]);
        auto col = m.col(static_cast<Eigen::Index>(k));
        col = (col.array() * domain.width(v) + domain.lo(v)).matrix();
    }
    return m;
}

auto make_context(BoxDomain const& domain, FixedMap const& fixed, std::uint64_t seed) -> std::vector<double>
{
    auto x = random_interior_point(domain, seed);
    for (auto const& [v, value] : fixed) { x.at(static_cast<std::size_t>(v)) = value; }
    return x;
}

auto evaluate_on_slice(Target const& f, VarSet const& vars, RowMatrix const& values,
    std::span<const double> base) -> Eigen::VectorXd
{
    std::vector<double> x(base.begin(), base.end());
    Eigen::VectorXd y(values.rows());
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (std::size_t k = 0; k < vars.size(); ++k) {
            x[static_cast<std::size_t>(vars[k])] = values(i, static_cast<Eigen::Index>(k));
        }
        y[i] = f(x);
    }
    return y;
}

} // namespace sepsys

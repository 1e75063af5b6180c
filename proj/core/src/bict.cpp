#include "sepsys/bict.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/QR>

#include "sepsys/rng.hpp"

namespace sepsys {

namespace {

auto free_complement(BoxDomain const& domain, VarSet const& subset, FixedMap const& fixed) -> VarSet
{
    VarSet rest;
    for (std::size_t i = 0; i < domain.n(); ++i) {
        auto const v = static_cast<int>(i);
        if (!contains(subset, v) && !fixed.contains(v)) { rest.push_back(v); }
    }
    return rest;
}

void check_probe(BoxDomain const& domain, VarSet const& subset, FixedMap const& fixed)
{
    if (subset.empty()) { throw std::invalid_argument("probe subset must be nonempty"); }
    for (auto v : subset) {
        if (v < 0 || static_cast<std::size_t>(v) >= domain.n()) { throw std::invalid_argument("probe variable out of range"); }
        if (fixed.contains(v)) { throw std::invalid_argument("probe subset overlaps the fixed context"); }
    }
    if (free_complement(domain, subset, fixed).empty()) {
        throw std::invalid_argument("probe subset must be a proper subset of the free variables");
    }
}

auto max_abs(Eigen::VectorXd const& v) -> double { return v.cwiseAbs().maxCoeff(); }

// Rows evaluated before the rest of an additive probe, and how far past
// the tolerance their spread must be to reject without the remaining rows.
constexpr Eigen::Index kScreenRows = 8;
constexpr double kScreenMargin = 1e3;

auto clearly_varies(Eigen::VectorXd const& d, double scale, Tolerance const& tol) -> bool
{
    auto screen = tol;
    screen.eps_const *= kScreenMargin;
    return !is_constant(as_span(d), screen, scale);
}

// Residual of u after least squares on span{d, 1}. Zero when u = a*d + C,
// which is the shape g(subset)*h(rest) + C takes on one context.
auto offset_residual(Eigen::VectorXd const& u, Eigen::VectorXd const& d) -> Eigen::VectorXd
{
    Eigen::MatrixXd basis(u.size(), 2);
    basis.col(0) = d;
    basis.col(1).setOnes();
    Eigen::VectorXd const coef = basis.colPivHouseholderQr().solve(u);
    return u - basis * coef;
}

} // namespace

void Tolerance::validate() const
{
    if (!(eps_const > 0.0) || !(eps_dep > 0.0)) { throw std::invalid_argument("tolerances must be positive"); }
    if (trials < 2) { throw std::invalid_argument("at least two trials are required"); }
    if (probe_rows < 3) { throw std::invalid_argument("probes need at least three rows"); }
}

auto is_constant(std::span<const double> v, Tolerance const& tol, double scale) -> bool
{
    if (v.size() < 2) { throw std::invalid_argument("is_constant needs at least two values"); }
    auto const mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double spread = 0.0;
    for (auto x : v) { spread = std::max(spread, std::abs(x - mean)); }
    return spread <= tol.eps_const * std::max({ 1.0, std::abs(mean), std::abs(scale) });
}

auto dependence_ratio(std::span<const double> u, std::span<const double> v) -> double
{
    if (u.size() != v.size()) { throw std::invalid_argument("vectors must have equal length"); }
    auto const nu = std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0));
    auto const nv = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (nu == 0.0 || nv == 0.0) { return 0.0; }
    double c = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) { c += (u[i] / nu) * (v[i] / nv); }
    auto const s = c < 0.0 ? -1.0 : 1.0;
    // sigma2/sigma1 = sqrt((1-|c|)/(1+|c|)); 1-|c| = |u' - s v'|^2 / 2 avoids cancellation
    double d2 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        auto const d = u[i] / nu - s * (v[i] / nv);
        d2 += d * d;
    }
    return std::sqrt(d2 / 2.0) / std::sqrt(1.0 + std::min(1.0, std::abs(c)));
}

auto is_linearly_dependent(std::span<const double> u, std::span<const double> v, Tolerance const& tol) -> bool
{
    if (u.size() < 3) { throw std::invalid_argument("dependence test needs at least three values"); }
    return dependence_ratio(u, v) <= tol.eps_dep;
}

auto additive_split_test(Target const& f, BoxDomain const& domain, VarSet const& subset,
    FixedMap const& fixed_ctx, Tolerance const& tol, std::uint64_t seed) -> bool
{
    check_probe(domain, subset, fixed_ctx);
    // Every trial pairs the base context b0 with its own context b_t on one shared row set.
    auto const rows = lhs_subset(domain, subset, tol.probe_rows, derive_seed(seed, { 0 }));
    auto const base = make_context(domain, fixed_ctx, derive_seed(seed, { 0, 1 }));
    auto const n_rows = rows.rows();
    auto const head = std::min(kScreenRows, n_rows);
    RowMatrix const first = rows.topRows(head);
    RowMatrix const rest = rows.bottomRows(n_rows - head);

    Eigen::VectorXd u0(n_rows);
    u0.head(head) = evaluate_on_slice(f, subset, first, base);
    bool have_tail = false;
    for (int t = 0; t < tol.trials; ++t) {
        auto const other = make_context(domain, fixed_ctx, derive_seed(seed, { static_cast<std::uint64_t>(t) + 1, 2 }));
        Eigen::VectorXd ut(n_rows);
        ut.head(head) = evaluate_on_slice(f, subset, first, other);
        if (clearly_varies(u0.head(head) - ut.head(head), std::max(max_abs(u0.head(head)), max_abs(ut.head(head))), tol)) {
            return false;
        }
        if (rest.rows() > 0) {
            if (!have_tail) {
                u0.tail(rest.rows()) = evaluate_on_slice(f, subset, rest, base);
                have_tail = true;
            }
            ut.tail(rest.rows()) = evaluate_on_slice(f, subset, rest, other);
        }
        Eigen::VectorXd const d = u0 - ut;
        if (!is_constant(as_span(d), tol, std::max(max_abs(u0), max_abs(ut)))) { return false; }
    }
    return true;
}

auto multiplicative_split_test(Target const& f, BoxDomain const& domain, VarSet const& subset,
    FixedMap const& fixed_ctx, Tolerance const& tol, std::uint64_t seed) -> bool
{
    check_probe(domain, subset, fixed_ctx);
    for (int t = 0; t < tol.trials; ++t) {
        auto const trial = static_cast<std::uint64_t>(t);
        auto const rows = lhs_subset(domain, subset, tol.probe_rows, derive_seed(seed, { trial, 0 }));
        auto const b1 = make_context(domain, fixed_ctx, derive_seed(seed, { trial, 1 }));
        auto const b2 = make_context(domain, fixed_ctx, derive_seed(seed, { trial, 2 }));
        auto const b3 = make_context(domain, fixed_ctx, derive_seed(seed, { trial, 3 }));
        Eigen::VectorXd const u1 = evaluate_on_slice(f, subset, rows, b1);
        Eigen::VectorXd const u2 = evaluate_on_slice(f, subset, rows, b2);
        Eigen::VectorXd const u3 = evaluate_on_slice(f, subset, rows, b3);
        auto const scale = std::max({ max_abs(u1), max_abs(u2), max_abs(u3) });
        Eigen::VectorXd const d1 = u1 - u2;
        Eigen::VectorXd const d2 = u1 - u3;
        if (is_constant(as_span(d1), tol, scale) || is_constant(as_span(d2), tol, scale)) { return false; }
        if (!is_linearly_dependent(as_span(d1), as_span(d2), tol)) { return false; }
        if (!is_constant(as_span(offset_residual(u1, d1)), tol, scale)) { return false; }
    }
    return true;
}

} // namespace sepsys

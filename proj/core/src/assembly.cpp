#include "sepsys/assembly.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "sepsys/block_detect.hpp"
#include "sepsys/errors.hpp"
#include "sepsys/rng.hpp"

namespace sepsys {

namespace {

constexpr int kSliceRedraws = 3;
constexpr double kMaxCondition = 1e10;
constexpr double kOffsetRoundoff = 1e-15;
constexpr double kInterceptRoundoff = 1e-14;

auto is_flat(Eigen::VectorXd const& v) -> bool
{
    auto const mean = v.mean();
    return (v.array() - mean).abs().maxCoeff() <= 1e-12 * std::max(1.0, std::abs(mean));
}

auto block_factors(BlockStructure const& b) -> std::vector<VarSet>
{
    auto all = b.nonrepeated_factors;
    all.insert(all.end(), b.repeated_factors.begin(), b.repeated_factors.end());
    return all;
}

auto fold_scale(FittedFactor& f, double& coefficient)
{
    coefficient *= f.scale;
    f.offset /= f.scale;
    f.scale = 1.0;
}

auto elapsed_ms(std::chrono::steady_clock::time_point since) -> double
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

} // namespace

auto slice_mode(GSStructure const& structure, std::size_t block, VarSet const& factor_vars) -> SliceMode
{
    auto const& b = structure.blocks.at(block);
    if (factor_vars != b.nonrepeated) { return SliceMode::Pure; }
    return b.has_repeated ? SliceMode::Ambiguous : SliceMode::Single;
}

auto fit_factor(Target const& f, BoxDomain const& domain, GSStructure const& structure, std::size_t block,
    VarSet const& factor_vars, FitConfig const& config, OptConfig const& opt, std::uint64_t seed) -> FittedFactor
{
    config.validate();
    auto const vars = make_varset(factor_vars);
    if (vars.empty() || vars.size() > 2) {
        throw UnsupportedArity("factor over " + std::to_string(vars.size()) + " variables; the library covers one or two");
    }
    auto const mode = slice_mode(structure, block, vars);
    auto const rows = lhs_subset(domain, vars, config.samples_per_var * vars.size(), derive_seed(seed, { 0 }));
    auto const others = set_difference(structure.blocks.at(block).nonrepeated, vars);

    Eigen::VectorXd y;
    bool usable = false;
    for (int attempt = 0; attempt < kSliceRedraws && !usable; ++attempt) {
        auto const a = static_cast<std::uint64_t>(attempt);
        auto const ctx = random_interior_point(domain, derive_seed(seed, { 1, a }));
        y = evaluate_on_slice(f, vars, rows, ctx);
        if (mode != SliceMode::Pure) {
            usable = true;
            break;
        }
        auto ctx2 = ctx;
        auto const alt = random_interior_point(domain, derive_seed(seed, { 2, a }));
        for (auto v : others) { ctx2[static_cast<std::size_t>(v)] = alt[static_cast<std::size_t>(v)]; }
        Eigen::VectorXd const y2 = evaluate_on_slice(f, vars, rows, ctx2);
        auto const scale = std::max(y.cwiseAbs().maxCoeff(), y2.cwiseAbs().maxCoeff());
        y -= y2;
        usable = y.cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, scale);
    }
    if (!usable) { throw DegenerateContextError("factor slice vanished for every drawn context"); }

    OptConfig local = opt;
    local.seed = derive_seed(seed, { 3 });
    auto factor = sequence_fit(rows, y, vars, config, local);
    if (mode != SliceMode::Pure) { factor.offset = 0.0; }
    return factor;
}

auto assemble_global(Target const& f, BoxDomain const& domain, GSStructure const& structure,
    std::vector<std::vector<FittedFactor>> factors, FitConfig const& config, std::uint64_t seed, AssemblyInfo* info)
    -> GSModel
{
    config.validate();
    auto const m = structure.blocks.size();
    if (factors.size() != m) { throw std::invalid_argument("one factor list per block is required"); }

    auto const sample = lhs_sample(domain, config.samples_per_var * domain.n(), seed);
    Eigen::VectorXd const y = evaluate_rows(f, sample.points);
    auto const n_rows = sample.rows();

    // index of the ambiguous factor per block, if any
    std::vector<int> ambiguous(m, -1);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < factors[i].size(); ++j) {
            auto const vars = make_varset(factors[i][j].vars);
            if (slice_mode(structure, i, vars) == SliceMode::Ambiguous) { ambiguous[i] = static_cast<int>(j); }
        }
    }

    std::vector<Eigen::VectorXd> block_cols(m, Eigen::VectorXd(n_rows));
    std::vector<Eigen::VectorXd> rest_cols(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (ambiguous[i] >= 0) { rest_cols[i].resize(n_rows); }
        for (Eigen::Index r = 0; r < n_rows; ++r) {
            auto const x = sample.row(r);
            double full = 1.0;
            double rest = 1.0;
            for (std::size_t j = 0; j < factors[i].size(); ++j) {
                auto const v = factors[i][j].value(x);
                full *= v;
                if (static_cast<int>(j) != ambiguous[i]) { rest *= v; }
            }
            block_cols[i][r] = full;
            if (ambiguous[i] >= 0) { rest_cols[i][r] = rest; }
        }
    }

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < m; ++i) {
        if (!is_flat(block_cols[i])) { active.push_back(i); }
    }
    std::vector<std::size_t> shifted;
    for (auto i : active) {
        if (ambiguous[i] >= 0) { shifted.push_back(i); }
    }

    auto const n_main = static_cast<Eigen::Index>(1 + active.size());
    Eigen::MatrixXd design(n_rows, n_main + static_cast<Eigen::Index>(shifted.size()));
    design.col(0).setOnes();
    for (std::size_t k = 0; k < active.size(); ++k) { design.col(static_cast<Eigen::Index>(k + 1)) = block_cols[active[k]]; }
    for (std::size_t k = 0; k < shifted.size(); ++k) { design.col(n_main + static_cast<Eigen::Index>(k)) = rest_cols[shifted[k]]; }

    Eigen::VectorXd norms = design.colwise().norm().transpose();
    for (Eigen::Index c = 0; c < norms.size(); ++c) {
        if (!(norms[c] > 0.0) || !std::isfinite(norms[c])) { throw IllConditionedAssembly("block column is zero or non-finite", INFINITY); }
    }
    Eigen::MatrixXd const scaled = design * norms.cwiseInverse().asDiagonal();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled.leftCols(n_main));
    auto const& sv = svd.singularValues();
    auto const condition = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : INFINITY;
    if (!(condition <= kMaxCondition)) {
        throw IllConditionedAssembly("block design matrix is ill-conditioned (condition " + std::to_string(condition) + ")", condition);
    }

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(1e-10);
    cod.compute(scaled);
    Eigen::VectorXd const coef = cod.solve(y).cwiseQuotient(norms);

    if (info != nullptr) {
        info->condition = condition;
        info->fit_mse = (design * coef - y).squaredNorm() / static_cast<double>(n_rows);
    }

    GSModel model;
    model.n_vars = domain.n();
    model.c.assign(m + 1, 0.0);
    model.c[0] = coef[0];
    for (std::size_t k = 0; k < active.size(); ++k) { model.c[active[k] + 1] = coef[static_cast<Eigen::Index>(k + 1)]; }
    for (std::size_t k = 0; k < shifted.size(); ++k) {
        auto const i = shifted[k];
        auto const c = model.c[i + 1];
        auto const d = coef[n_main + static_cast<Eigen::Index>(k)];
        if (c != 0.0) { factors[i][static_cast<std::size_t>(ambiguous[i])].offset = d / c; }
    }

    for (std::size_t i = 0; i < m; ++i) {
        auto& coefficient = model.c[i + 1];
        for (auto& fac : factors[i]) {
            for (int pass = 0; pass < 2; ++pass) {
                fac = canonicalize(fac);
                fold_scale(fac, coefficient);
            }
            if (std::abs(fac.offset) <= kOffsetRoundoff) { fac.offset = 0.0; }
        }
        sort_factors(factors[i]);
    }
    auto const largest = std::accumulate(model.c.begin() + 1, model.c.end(), 1.0,
        [](double acc, double v) { return std::max(acc, std::abs(v)); });
    if (std::abs(model.c[0]) <= kInterceptRoundoff * largest) { model.c[0] = 0.0; }
    model.blocks = std::move(factors);
    return model;
}

auto compute_mse(GSModel const& model, Target const& f, BoxDomain const& domain, std::size_t n_points, std::uint64_t seed)
    -> double
{
    auto const sample = lhs_sample(domain, n_points, seed);
    double total = 0.0;
    for (Eigen::Index r = 0; r < sample.rows(); ++r) {
        auto const x = sample.row(r);
        auto const d = f(x) - eval_model(model, x);
        total += d * d;
    }
    return total / static_cast<double>(sample.rows());
}

auto run_mbb(Target const& f, BoxDomain const& domain, MbbConfig const& config, std::uint64_t seed) -> MbbResult
{
    MbbResult out;
    auto& metrics = out.metrics;
    auto const start_evals = f.evaluations();

    auto t0 = std::chrono::steady_clock::now();
    try {
        auto const blocks = detect_minimal_blocks(f, domain, config.tol, derive_seed(seed, { 1 }));
        out.structure = detect_factors(f, domain, blocks, config.tol, derive_seed(seed, { 2 }), config.polarity);
    } catch (std::exception const& e) {
        throw StageError("detection", e.what());
    }
    metrics.t1_ms = elapsed_ms(t0);
    metrics.evals_detect = f.evaluations() - start_evals;

    t0 = std::chrono::steady_clock::now();
    std::vector<std::vector<FittedFactor>> factors(out.structure.blocks.size());
    try {
        for (std::size_t i = 0; i < out.structure.blocks.size(); ++i) {
            auto const sets = block_factors(out.structure.blocks[i]);
            for (std::size_t j = 0; j < sets.size(); ++j) {
                factors[i].push_back(fit_factor(f, domain, out.structure, i, sets[j], config.fit, config.opt,
                    derive_seed(seed, { 3, i, j })));
            }
        }
    } catch (std::exception const& e) {
        throw StageError("fitting", e.what());
    }
    metrics.t2_ms = elapsed_ms(t0);
    metrics.evals_fit = f.evaluations() - start_evals - metrics.evals_detect;

    t0 = std::chrono::steady_clock::now();
    try {
        AssemblyInfo info;
        out.model = assemble_global(f, domain, out.structure, std::move(factors), config.fit, derive_seed(seed, { 4 }), &info);
        metrics.assembly_mse = info.fit_mse;
        metrics.mse = compute_mse(out.model, f, domain, config.fit.samples_per_var * domain.n(), derive_seed(seed, { 5 }));
    } catch (std::exception const& e) {
        throw StageError("assembly", e.what());
    }
    metrics.t3_ms = elapsed_ms(t0);
    metrics.evals_assembly = f.evaluations() - start_evals - metrics.evals_detect - metrics.evals_fit;
    metrics.success = metrics.mse <= config.fit.eps_target;
    return out;
}

} // namespace sepsys

#include "sepsys/template_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <tuple>
#include <stdexcept>

#include <Eigen/QR>

#include "sepsys/errors.hpp"
#include "sepsys/rng.hpp"

namespace sepsys {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Eigen::Index kSubsampleRows = 64;

struct Shape {
    int nonlinear; // searched parameters
    int columns;   // least-squares columns besides the constant
};

auto shape_of(TemplateId id) -> Shape
{
    switch (id) {
    case TemplateId::U1: return { 1, 1 };
    case TemplateId::U2: return { 1, 1 };
    case TemplateId::U3: return { 1, 2 };
    case TemplateId::U4: return { 1, 1 };
    case TemplateId::B1: return { 0, 2 };
    case TemplateId::B2: return { 1, 1 };
    case TemplateId::B3: return { 2, 2 };
    case TemplateId::B4: return { 3, 2 };
    case TemplateId::E1: return { 1, 1 };
    case TemplateId::E2: return { 3, 3 };
    }
    throw std::invalid_argument("unknown template");
}

auto is_asymmetric(TemplateId id) -> bool
{
    return id == TemplateId::B3 || id == TemplateId::E1 || id == TemplateId::E2;
}

// Variable-projection view of one template on a fixed data slice.
class Projection {
public:
    Projection(TemplateId id, RowMatrix const& x, Eigen::VectorXd const& y)
        : id_(id), shape_(shape_of(id)), x_(x), y_(y)
    {
        integer_power_ = id == TemplateId::U1 && x.col(0).minCoeff() <= 0.0;
    }

    [[nodiscard]] auto nonlinear() const -> int { return shape_.nonlinear; }

    // Relative MSE over the first `rows` rows for searched parameters q.
    auto objective(std::span<const double> q, Eigen::Index rows) -> double
    {
        if (!fill(q, rows)) { return kInf; }
        auto const v = variance(rows);
        if (!(v > 0.0)) { return kInf; }
        qr_.compute(a_);
        coef_ = qr_.solve(y_.head(rows));
        if (!coef_.allFinite()) { return kInf; }
        auto const mse = (a_ * coef_ - y_.head(rows)).squaredNorm() / static_cast<double>(rows);
        auto const rel = mse / v;
        return std::isfinite(rel) ? rel : kInf;
    }

    // Factor for q; call objective(q, all rows) first.
    [[nodiscard]] auto factor(std::span<const double> q) const -> FittedFactor
    {
        FittedFactor f;
        f.id = id_;
        auto const& c = coef_;
        auto const offset = c[c.size() - 1];
        switch (id_) {
        case TemplateId::U1:
            f.params = { integer_power_ ? std::nearbyint(q[0]) : q[0] };
            f.scale = c[0];
            break;
        case TemplateId::U2:
        case TemplateId::B2:
            f.params = { q[0] };
            f.scale = c[0];
            break;
        case TemplateId::U3:
        case TemplateId::B4: {
            // a*sin(t) + b*cos(t) = R*sin(t + phi)
            auto const amplitude = std::hypot(c[0], c[1]);
            auto const phase = std::atan2(c[1], c[0]);
            f.params.assign(q.begin(), q.end());
            f.params.push_back(phase);
            f.scale = amplitude;
            break;
        }
        case TemplateId::U4:
        case TemplateId::E1:
            f.params = { sign_, sign_ * q[0] };
            f.scale = c[0];
            break;
        case TemplateId::B1:
            f.params = { c[0], c[1] };
            f.scale = 1.0;
            break;
        case TemplateId::B3: {
            auto m1 = q[0], m3 = q[1];
            auto a = c[0], b = c[1];
            if (std::abs(a) < std::abs(b)) {
                std::swap(m1, m3);
                std::swap(a, b);
            }
            f.params = { m1, b / a, m3, 0.0 };
            f.scale = a;
            break;
        }
        case TemplateId::E2: {
            auto m1 = q[1], m3 = q[2];
            auto a = c[0], b = c[1];
            if (std::abs(a) < std::abs(b)) {
                std::swap(m1, m3);
                std::swap(a, b);
            }
            f.params = { q[0], m1, b / a, m3, c[2] / a };
            f.scale = a;
            break;
        }
        }
        f.offset = offset;
        return f;
    }

private:
    auto variance(Eigen::Index rows) const -> double
    {
        auto const head = y_.head(rows);
        auto const mean = head.mean();
        return (head.array() - mean).square().mean();
    }

    auto fill(std::span<const double> q, Eigen::Index rows) -> bool
    {
        a_.resize(rows, shape_.columns + 1);
        a_.col(shape_.columns).setOnes();
        auto const x1 = x_.col(0).head(rows).array();
        switch (id_) {
        case TemplateId::U1: {
            auto const m = integer_power_ ? std::nearbyint(q[0]) : q[0];
            a_.col(0) = x1.pow(m).matrix();
            break;
        }
        case TemplateId::U2: a_.col(0) = (q[0] * x1).exp().matrix(); break;
        case TemplateId::U3:
            a_.col(0) = (q[0] * x1).sin().matrix();
            a_.col(1) = (q[0] * x1).cos().matrix();
            break;
        case TemplateId::U4:
            if (!log_column(x1 + q[0])) { return false; }
            break;
        case TemplateId::B1:
            a_.col(0) = x1.matrix();
            a_.col(1) = x_.col(1).head(rows);
            break;
        case TemplateId::B2: a_.col(0) = (q[0] * x1 * x_.col(1).head(rows).array()).exp().matrix(); break;
        case TemplateId::B3: {
            auto const r = x1 / x_.col(1).head(rows).array();
            a_.col(0) = r.pow(q[0]).matrix();
            a_.col(1) = r.pow(q[1]).matrix();
            break;
        }
        case TemplateId::B4: {
            auto const x2 = x_.col(1).head(rows).array();
            Eigen::ArrayXd const t = q[0] * x1 + q[1] * x2 + q[2] * x1 * x2;
            a_.col(0) = t.sin().matrix();
            a_.col(1) = t.cos().matrix();
            break;
        }
        case TemplateId::E1:
            if (!log_column(x1 / x_.col(1).head(rows).array() + q[0])) { return false; }
            break;
        case TemplateId::E2: {
            auto const x2 = x_.col(1).head(rows).array();
            Eigen::ArrayXd const base = x2.pow(q[0]);
            Eigen::ArrayXd const r = x1 / x2;
            a_.col(0) = (base * r.pow(q[1])).matrix();
            a_.col(1) = (base * r.pow(q[2])).matrix();
            a_.col(2) = base.matrix();
            break;
        }
        }
        return a_.allFinite();
    }

    template <typename Arg>
    auto log_column(Arg const& arg) -> bool
    {
        Eigen::ArrayXd const v = arg;
        if (v.size() == 0) { return false; }
        sign_ = v[0] < 0.0 ? -1.0 : 1.0;
        Eigen::ArrayXd const s = sign_ * v;
        if (!(s.minCoeff() > 0.0)) { return false; }
        a_.col(0) = s.log().matrix();
        return true;
    }

    TemplateId id_;
    Shape shape_;
    RowMatrix const& x_;
    Eigen::VectorXd const& y_;
    bool integer_power_ { false };
    double sign_ { 1.0 };
    Eigen::MatrixXd a_;
    Eigen::VectorXd coef_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
};

void add_axis_grid(std::vector<double>& out, double lo, double hi, double step)
{
    auto const count = static_cast<int>(std::lround((hi - lo) / step));
    for (int i = 0; i <= count; ++i) { out.push_back(lo + step * i); }
}

auto grid_points(int k) -> std::vector<std::vector<double>>
{
    std::vector<std::vector<double>> pts;
    if (k == 1) {
        std::vector<double> axis;
        add_axis_grid(axis, -5.0, 5.0, 0.01);
        add_axis_grid(axis, -50.0, 50.0, 0.25);
        for (auto v : axis) { pts.push_back({ v }); }
    } else if (k == 2) {
        for (auto const& [lo, hi, step] : { std::tuple { -5.0, 5.0, 0.25 }, std::tuple { -50.0, 50.0, 2.5 } }) {
            std::vector<double> axis;
            add_axis_grid(axis, lo, hi, step);
            for (auto a : axis) {
                for (auto b : axis) { pts.push_back({ a, b }); }
            }
        }
    } else if (k == 3) {
        std::vector<double> axis;
        add_axis_grid(axis, -4.0, 4.0, 0.5);
        for (auto a : axis) {
            for (auto b : axis) {
                for (auto c : axis) { pts.push_back({ a, b, c }); }
            }
        }
    }
    return pts;
}

auto subsample_rows(Eigen::Index n) -> Eigen::Index { return std::min(n, kSubsampleRows); }

} // namespace

void FitConfig::validate() const
{
    if (!(eps_target > 0.0)) { throw std::invalid_argument("eps_target must be positive"); }
    if (samples_per_var < 10) { throw std::invalid_argument("samples_per_var must be at least 10"); }
    if (attempts < 1) { throw std::invalid_argument("attempts must be at least 1"); }
    if (library_order.empty()) { throw std::invalid_argument("library_order must name at least one template"); }
}

auto fit_template(TemplateId id, RowMatrix const& inputs, Eigen::VectorXd const& y, OptConfig const& opt, int attempt)
    -> TemplateFit
{
    auto const& info = template_info(id);
    if (static_cast<std::size_t>(inputs.cols()) != info.arity) { throw std::invalid_argument("input columns do not match template arity"); }
    if (inputs.rows() != y.size() || y.size() < 4) { throw std::invalid_argument("fit needs matching inputs and at least four responses"); }

    Projection proj(id, inputs, y);
    auto const k = static_cast<std::size_t>(proj.nonlinear());
    auto const all = y.size();
    TemplateFit out;

    std::vector<double> q;
    if (k > 0) {
        auto const sub = subsample_rows(all);
        OptConfig cfg = opt;
        cfg.pop_size = opt.resolved_pop(info.n_params);
        cfg.max_gens = opt.resolved_gens(info.n_params);
        cfg.seed = derive_seed(opt.seed, { static_cast<std::uint64_t>(id), static_cast<std::uint64_t>(attempt) });
        cfg.target_obj = 1e-20;
        cfg.initial.clear();

        auto grid = grid_points(static_cast<int>(k));
        std::vector<std::pair<double, std::size_t>> scored;
        scored.reserve(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid[i].front() < opt.lower || grid[i].front() > opt.upper) { continue; }
            scored.emplace_back(proj.objective(grid[i], sub), i);
        }
        out.evals += scored.size();
        std::stable_sort(scored.begin(), scored.end(), [](auto const& a, auto const& b) { return a.first < b.first; });
        auto const seeds = attempt == 0 ? cfg.pop_size / 2 : std::size_t { 1 };
        for (std::size_t i = 0; i < scored.size() && cfg.initial.size() < seeds; ++i) {
            cfg.initial.push_back(grid[scored[i].second]);
        }

        auto const sub_obj = [&](std::span<const double> p) { return proj.objective(p, sub); };
        auto const global = minimize(sub_obj, k, cfg);
        out.evals += global.evals;

        OptConfig polish_cfg = cfg;
        polish_cfg.target_obj = 1e-30;
        auto const full_obj = [&](std::span<const double> p) { return proj.objective(p, all); };
        auto const fine = polish(full_obj, global.best_params, polish_cfg, 3000);
        out.evals += fine.evals;
        q = fine.best_params;
    }
    out.rel_mse = proj.objective(q, all);
    ++out.evals;
    if (std::isfinite(out.rel_mse)) { out.factor = proj.factor(q); }
    if (!std::isfinite(out.rel_mse) || out.factor.scale == 0.0 || !std::isfinite(out.factor.scale)) {
        out.rel_mse = kInf;
    }
    out.factor.fit_mse = out.rel_mse;
    return out;
}

auto sequence_fit(RowMatrix const& inputs, Eigen::VectorXd const& y, VarSet const& vars, FitConfig const& config,
    OptConfig const& opt) -> FittedFactor
{
    config.validate();
    auto const arity = vars.size();
    if (arity == 0 || arity > 2) { throw UnsupportedArity("factors must have one or two variables"); }
    if (static_cast<std::size_t>(inputs.cols()) != arity) { throw std::invalid_argument("input columns do not match factor variables"); }

    auto const mean = y.mean();
    auto const spread = (y.array() - mean).abs().maxCoeff();
    if (spread <= 1e-12 * std::max(1.0, std::abs(mean))) {
        FittedFactor f;
        f.id = TemplateId::U1;
        f.params = { 0.0 };
        f.scale = mean == 0.0 ? 1.0 : mean;
        f.vars = { vars.front() };
        return f;
    }

    struct Candidate {
        TemplateId id;
        bool reversed;
    };
    std::vector<Candidate> candidates;
    for (auto id : config.library_order) {
        if (template_info(id).arity != arity) { continue; }
        candidates.push_back({ id, false });
        if (is_asymmetric(id)) { candidates.push_back({ id, true }); }
    }
    if (candidates.empty()) { throw NoModelFits("no template in the library matches the factor arity", kInf); }

    RowMatrix swapped;
    if (arity == 2) {
        swapped.resize(inputs.rows(), 2);
        swapped.col(0) = inputs.col(1);
        swapped.col(1) = inputs.col(0);
    }

    std::optional<TemplateFit> best;
    auto try_candidate = [&](Candidate const& c, int attempt) -> bool {
        auto fit = fit_template(c.id, c.reversed ? swapped : inputs, y, opt, attempt);
        fit.factor.vars = c.reversed ? std::vector<int> { vars[1], vars[0] } : std::vector<int>(vars.begin(), vars.end());
        auto const accepted = fit.rel_mse <= config.eps_target;
        if (!best || fit.rel_mse < best->rel_mse) { best = std::move(fit); }
        return accepted;
    };

    for (auto const& c : candidates) {
        if (try_candidate(c, 0)) { return best->factor; }
    }
    for (int attempt = 1; attempt < config.attempts; ++attempt) {
        for (auto const& c : candidates) {
            if (shape_of(c.id).nonlinear == 0) { continue; }
            if (try_candidate(c, attempt)) { return best->factor; }
        }
    }
    throw NoModelFits("no template reached eps_target (best relative MSE " + std::to_string(best->rel_mse) + ")",
        best->rel_mse);
}

} // namespace sepsys

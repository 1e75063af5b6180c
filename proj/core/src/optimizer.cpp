#include "sepsys/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sepsys/rng.hpp"

namespace sepsys {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Counted {
    Objective const& fn;
    std::size_t evals { 0 };

    auto operator()(std::span<const double> x) -> double
    {
        ++evals;
        auto const v = fn(x);
        return std::isfinite(v) ? v : kInf;
    }
};

auto clip(double v, double lo, double hi) -> double { return std::min(hi, std::max(lo, v)); }

auto reflect(double v, double lo, double hi, Rng& rng) -> double
{
    if (v < lo) { v = lo + (lo - v); }
    if (v > hi) { v = hi - (v - hi); }
    if (v < lo || v > hi) { v = rng.uniform(lo, hi); }
    return v;
}

} // namespace

auto OptConfig::resolved_pop(std::size_t dim) const -> std::size_t
{
    return pop_size != 0 ? pop_size : 10 + 10 * dim;
}

auto OptConfig::resolved_gens(std::size_t dim) const -> std::size_t
{
    return max_gens != 0 ? max_gens : 3 * resolved_pop(dim);
}

auto OptConfig::resolved_refine(std::size_t dim) const -> std::size_t
{
    return refine_evals != 0 ? refine_evals : 200 * dim;
}

void OptConfig::validate(std::size_t dim) const
{
    if (dim == 0) { throw std::invalid_argument("optimizer dimension must be positive"); }
    if (!(lower < upper)) { throw std::invalid_argument("optimizer bounds must satisfy lower < upper"); }
    if (resolved_pop(dim) < 4) { throw std::invalid_argument("population size must be at least 4"); }
}

auto minimize(Objective const& objective, std::size_t dim, OptConfig const& config) -> OptResult
{
    config.validate(dim);
    auto const np = config.resolved_pop(dim);
    auto const gens = config.resolved_gens(dim);
    auto const lo = config.lower;
    auto const hi = config.upper;
    Rng rng(config.seed);
    Counted eval { objective };

    std::vector<std::vector<double>> pop(np, std::vector<double>(dim));
    std::vector<double> fit(np);
    for (std::size_t i = 0; i < np; ++i) {
        if (i < config.initial.size() && config.initial[i].size() == dim) {
            for (std::size_t d = 0; d < dim; ++d) { pop[i][d] = clip(config.initial[i][d], lo, hi); }
        } else {
            for (auto& v : pop[i]) { v = rng.uniform(lo, hi); }
        }
        fit[i] = eval(pop[i]);
    }

    OptResult res;
    auto best_index = [&] { return static_cast<std::size_t>(std::min_element(fit.begin(), fit.end()) - fit.begin()); };
    auto record = [&] {
        auto const b = best_index();
        res.best_params = pop[b];
        res.best_value = fit[b];
    };
    record();

    std::vector<double> trial(dim);
    std::vector<std::vector<double>> next = pop;
    std::vector<double> next_fit = fit;
    for (std::size_t g = 0; g < gens && !(res.best_value <= config.target_obj); ++g) {
        for (std::size_t i = 0; i < np; ++i) {
            std::size_t r1 = 0, r2 = 0, r3 = 0;
            do { r1 = rng.below(np); } while (r1 == i);
            do { r2 = rng.below(np); } while (r2 == i || r2 == r1);
            do { r3 = rng.below(np); } while (r3 == i || r3 == r1 || r3 == r2);
            auto const F = 0.5 + 0.3 * rng.uniform();
            auto const jrand = rng.below(dim);
            for (std::size_t d = 0; d < dim; ++d) {
                if (d == jrand || rng.uniform() < 0.9) {
                    trial[d] = reflect(pop[r1][d] + F * (pop[r2][d] - pop[r3][d]), lo, hi, rng);
                } else {
                    trial[d] = pop[i][d];
                }
            }
            auto const ft = eval(trial);
            if (ft <= fit[i]) {
                next[i] = trial;
                next_fit[i] = ft;
            } else {
                next[i] = pop[i];
                next_fit[i] = fit[i];
            }
        }
        std::swap(pop, next);
        std::swap(fit, next_fit);

        // simplex step in a 1-3 dimensional coordinate subspace around the best member
        auto const b = best_index();
        auto const k = 1 + rng.below(std::min<std::size_t>(3, dim));
        std::vector<std::size_t> coords(dim);
        std::iota(coords.begin(), coords.end(), std::size_t { 0 });
        for (std::size_t j = 0; j < k; ++j) { std::swap(coords[j], coords[j + rng.below(dim - j)]); }
        coords.resize(k);

        std::vector<std::vector<double>> simplex { pop[b] };
        std::vector<double> sf { fit[b] };
        for (std::size_t j = 0; j < k; ++j) {
            auto p = pop[b];
            auto const other = rng.below(np);
            for (auto c : coords) { p[c] = pop[other][c]; }
            if (other == b) {
                for (auto c : coords) { p[c] = clip(p[c] + 0.05 * (hi - lo) * (rng.uniform() - 0.5), lo, hi); }
            }
            sf.push_back(eval(p));
            simplex.push_back(std::move(p));
        }
        auto const worst = static_cast<std::size_t>(std::max_element(sf.begin(), sf.end()) - sf.begin());
        auto centroid = pop[b];
        for (auto c : coords) {
            double s = 0.0;
            for (std::size_t j = 0; j < simplex.size(); ++j) {
                if (j != worst) { s += simplex[j][c]; }
            }
            centroid[c] = s / static_cast<double>(simplex.size() - 1);
        }
        auto move = [&](double t) {
            auto p = centroid;
            for (auto c : coords) { p[c] = clip(centroid[c] + t * (centroid[c] - simplex[worst][c]), lo, hi); }
            return p;
        };
        auto cand = move(1.0);
        auto fc = eval(cand);
        if (fc < fit[b]) {
            auto exp_p = move(2.0);
            auto const fe = eval(exp_p);
            if (fe < fc) {
                cand = std::move(exp_p);
                fc = fe;
            }
        } else if (fc >= sf[worst]) {
            cand = move(-0.5);
            fc = eval(cand);
        }
        auto const w = static_cast<std::size_t>(std::max_element(fit.begin(), fit.end()) - fit.begin());
        if (fc < fit[w]) {
            pop[w] = std::move(cand);
            fit[w] = fc;
        }
        record();
        res.history.push_back(res.best_value);
    }
    res.evals = eval.evals;
    if (!(res.best_value <= config.target_obj)) {
        auto refined = polish(objective, res.best_params, config, config.resolved_refine(dim));
        res.evals += refined.evals;
        if (refined.best_value < res.best_value) {
            res.best_params = std::move(refined.best_params);
            res.best_value = refined.best_value;
        }
        res.history.push_back(res.best_value);
    }
    return res;
}

auto polish(Objective const& objective, std::vector<double> x0, OptConfig const& config, std::size_t max_evals) -> OptResult
{
    auto const dim = x0.size();
    config.validate(dim);
    auto const lo = config.lower;
    auto const hi = config.upper;
    Counted eval { objective };
    for (auto& v : x0) { v = clip(v, lo, hi); }

    OptResult res;
    res.best_params = x0;
    res.best_value = eval(x0);

    auto const n1 = dim + 1;
    while (eval.evals < max_evals && !(res.best_value <= config.target_obj)) {
        auto const start_value = res.best_value;
        std::vector<std::vector<double>> s(n1, res.best_params);
        std::vector<double> fs(n1);
        fs[0] = res.best_value;
        for (std::size_t j = 0; j < dim; ++j) {
            auto const step = std::max(1e-3, 0.05 * std::abs(s[0][j]));
            s[j + 1][j] = clip(s[0][j] + step, lo, hi);
            if (s[j + 1][j] == s[0][j]) { s[j + 1][j] = clip(s[0][j] - step, lo, hi); }
            fs[j + 1] = eval(s[j + 1]);
        }
        std::vector<std::size_t> order(n1);
        while (eval.evals < max_evals) {
            std::iota(order.begin(), order.end(), std::size_t { 0 });
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
            auto const ib = order.front();
            auto const iw = order.back();
            auto const is = order[n1 - 2];
            if (!(res.best_value <= fs[ib])) {
                res.best_value = fs[ib];
                res.best_params = s[ib];
            }
            if (res.best_value <= config.target_obj) { break; }
            double spread = 0.0;
            for (std::size_t j = 0; j < n1; ++j) {
                for (std::size_t d = 0; d < dim; ++d) { spread = std::max(spread, std::abs(s[j][d] - s[ib][d])); }
            }
            if (spread <= 1e-13 * (1.0 + std::abs(s[ib][0])) || (std::isfinite(fs[iw]) && fs[iw] - fs[ib] <= 1e-300)) { break; }

            std::vector<double> c(dim, 0.0);
            for (std::size_t j = 0; j < n1; ++j) {
                if (j == iw) { continue; }
                for (std::size_t d = 0; d < dim; ++d) { c[d] += s[j][d] / static_cast<double>(dim); }
            }
            auto along = [&](double t) {
                std::vector<double> p(dim);
                for (std::size_t d = 0; d < dim; ++d) { p[d] = clip(c[d] + t * (c[d] - s[iw][d]), lo, hi); }
                return p;
            };
            auto xr = along(1.0);
            auto const fr = eval(xr);
            if (fr < fs[ib]) {
                auto xe = along(2.0);
                auto const fe = eval(xe);
                if (fe < fr) {
                    s[iw] = std::move(xe);
                    fs[iw] = fe;
                } else {
                    s[iw] = std::move(xr);
                    fs[iw] = fr;
                }
            } else if (fr < fs[is]) {
                s[iw] = std::move(xr);
                fs[iw] = fr;
            } else {
                auto xc = fr < fs[iw] ? along(0.5) : along(-0.5);
                auto const fc = eval(xc);
                if (fc < std::min(fr, fs[iw])) {
                    s[iw] = std::move(xc);
                    fs[iw] = fc;
                } else {
                    for (std::size_t j = 0; j < n1; ++j) {
                        if (j == ib) { continue; }
                        for (std::size_t d = 0; d < dim; ++d) { s[j][d] = s[ib][d] + 0.5 * (s[j][d] - s[ib][d]); }
                        fs[j] = eval(s[j]);
                    }
                }
            }
        }
        for (std::size_t j = 0; j < n1; ++j) {
            if (fs[j] < res.best_value) {
                res.best_value = fs[j];
                res.best_params = s[j];
            }
        }
        if (!(res.best_value < start_value)) { break; }
    }
    res.evals = eval.evals;
    return res;
}

} // namespace sepsys

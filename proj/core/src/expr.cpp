#include "sepsys/expr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "sepsys/errors.hpp"

namespace sepsys {

namespace {

constexpr std::array<ModelTemplate, 10> kTemplates { {
    { TemplateId::U1, "U1", 1, 1, "x^m1" },
    { TemplateId::U2, "U2", 1, 1, "exp(m1*x)" },
    { TemplateId::U3, "U3", 1, 2, "sin(m1*x + m2)" },
    { TemplateId::U4, "U4", 1, 2, "ln(m1*x + m2)" },
    { TemplateId::B1, "B1", 2, 2, "m1*x1 + m2*x2" },
    { TemplateId::B2, "B2", 2, 1, "exp(m1*x1*x2)" },
    { TemplateId::B3, "B3", 2, 4, "(x1/x2)^m1 + m2*(x1/x2)^m3 + m4" },
    { TemplateId::B4, "B4", 2, 4, "sin(m1*x1 + m2*x2 + m3*x1*x2 + m4)" },
    { TemplateId::E1, "E1", 2, 2, "ln(m1*(x1/x2) + m2)" },
    { TemplateId::E2, "E2", 2, 5, "x2^m1 * ((x1/x2)^m2 + m3*(x1/x2)^m4 + m5)" },
} };

auto is_integer(double v) -> bool { return std::nearbyint(v) == v; }

auto checked_pow(double base, double e) -> double
{
    if (base == 0.0 && e < 0.0) { throw DomainError("0 raised to a negative power"); }
    if (base < 0.0 && !is_integer(e)) { throw DomainError("negative base raised to a non-integer power"); }
    return std::pow(base, e);
}

auto checked_log(double arg) -> double
{
    if (!(arg > 0.0)) { throw DomainError("logarithm of a non-positive argument"); }
    return std::log(arg);
}

auto checked_ratio(double num, double den) -> double
{
    if (den == 0.0) { throw DomainError("ratio model with zero denominator"); }
    return num / den;
}

auto wrap_phase(double phase, double& scale) -> double
{
    constexpr double pi = std::numbers::pi;
    phase = std::remainder(phase, 2.0 * pi); // [-pi, pi]
    constexpr double upper = pi / 2.0 + 1e-9;
    if (phase > upper) {
        phase -= pi;
        scale = -scale;
    } else if (phase <= -pi / 2.0 + 1e-9) {
        phase += pi;
        scale = -scale;
    }
    return phase;
}

} // namespace

auto template_info(TemplateId id) -> ModelTemplate const&
{
    return kTemplates.at(static_cast<std::size_t>(id));
}

auto all_templates() -> std::span<ModelTemplate const> { return kTemplates; }

auto template_from_name(std::string_view name) -> std::optional<TemplateId>
{
    for (auto const& t : kTemplates) {
        if (t.name == name) { return t.id; }
    }
    return std::nullopt;
}

auto eval_template(TemplateId id, std::span<const double> p, std::span<const double> x) -> double
{
    auto const& info = template_info(id);
    if (x.size() != info.arity) { throw std::invalid_argument(fmt::format("{} expects {} inputs", info.name, info.arity)); }
    if (p.size() != info.n_params) { throw std::invalid_argument(fmt::format("{} expects {} parameters", info.name, info.n_params)); }

    switch (id) {
    case TemplateId::U1: return checked_pow(x[0], p[0]);
    case TemplateId::U2: return std::exp(p[0] * x[0]);
    case TemplateId::U3: return std::sin(p[0] * x[0] + p[1]);
    case TemplateId::U4: return checked_log(p[0] * x[0] + p[1]);
    case TemplateId::B1: return p[0] * x[0] + p[1] * x[1];
    case TemplateId::B2: return std::exp(p[0] * x[0] * x[1]);
    case TemplateId::B3: {
        auto const r = checked_ratio(x[0], x[1]);
        return checked_pow(r, p[0]) + p[1] * checked_pow(r, p[2]) + p[3];
    }
    case TemplateId::B4: return std::sin(p[0] * x[0] + p[1] * x[1] + p[2] * x[0] * x[1] + p[3]);
    case TemplateId::E1: return checked_log(p[0] * checked_ratio(x[0], x[1]) + p[1]);
    case TemplateId::E2: {
        auto const r = checked_ratio(x[0], x[1]);
        return checked_pow(x[1], p[0]) * (checked_pow(r, p[1]) + p[2] * checked_pow(r, p[3]) + p[4]);
    }
    }
    throw std::invalid_argument("unknown template");
}

auto FittedFactor::value(std::span<const double> x) const -> double
{
    std::array<double, 2> in {};
    for (std::size_t i = 0; i < vars.size(); ++i) { in[i] = x[static_cast<std::size_t>(vars[i])]; }
    return scale * eval_template(id, params, std::span<const double>(in.data(), vars.size())) + offset;
}

void FittedFactor::validate() const
{
    auto const& info = template_info(id);
    if (vars.size() != info.arity) { throw std::invalid_argument("factor variable count does not match template arity"); }
    if (params.size() != info.n_params) { throw std::invalid_argument("factor parameter count does not match template"); }
    if (vars.size() == 2 && vars[0] == vars[1]) { throw std::invalid_argument("factor variables must be distinct"); }
    if (scale == 0.0) { throw std::invalid_argument("factor scale must be non-zero"); }
}

auto GSModel::block_value(std::size_t block, std::span<const double> x) const -> double
{
    double v = 1.0;
    for (auto const& f : blocks.at(block)) { v *= f.value(x); }
    return v;
}

void GSModel::validate() const
{
    if (c.size() != blocks.size() + 1) { throw std::invalid_argument("coefficient count must be blocks + 1"); }
    for (auto const& b : blocks) {
        for (auto const& f : b) {
            f.validate();
            for (auto v : f.vars) {
                if (v < 0 || static_cast<std::size_t>(v) >= n_vars) { throw std::invalid_argument("factor variable out of range"); }
            }
        }
    }
}

auto eval_model(GSModel const& model, std::span<const double> x) -> double
{
    if (x.size() != model.n_vars) { throw std::invalid_argument("input length does not match model"); }
    double y = model.c[0];
    for (std::size_t i = 0; i < model.blocks.size(); ++i) {
        y += model.c[i + 1] * model.block_value(i, x);
    }
    return y;
}

auto canonicalize(FittedFactor f) -> FittedFactor
{
    switch (f.id) {
    case TemplateId::U3:
        if (f.params[0] < 0.0) {
            f.params[0] = -f.params[0];
            f.params[1] = -f.params[1];
            f.scale = -f.scale;
        }
        f.params[1] = wrap_phase(f.params[1], f.scale);
        break;
    case TemplateId::B4: {
        auto lead = std::find_if(f.params.begin(), f.params.begin() + 3, [](double v) { return v != 0.0; });
        if (lead != f.params.begin() + 3 && *lead < 0.0) {
            for (auto& v : f.params) { v = -v; }
            f.scale = -f.scale;
        }
        f.params[3] = wrap_phase(f.params[3], f.scale);
        break;
    }
    case TemplateId::B3:
        if (f.offset != 0.0) {
            f.params[3] += f.offset / f.scale;
            f.offset = 0.0;
        }
        break;
    case TemplateId::U4:
    case TemplateId::E1:
        // s*ln(a*u + b) + o == s*ln(e^(o/s)*a*u + e^(o/s)*b)
        if (f.offset != 0.0 && f.scale != 0.0 && std::abs(f.offset / f.scale) < 300.0) {
            auto const k = std::exp(f.offset / f.scale);
            f.params[0] *= k;
            f.params[1] *= k;
            f.offset = 0.0;
        }
        break;
    default: break;
    }
    return f;
}

void sort_factors(std::vector<FittedFactor>& factors)
{
    std::stable_sort(factors.begin(), factors.end(), [](FittedFactor const& a, FittedFactor const& b) {
        auto const ma = *std::min_element(a.vars.begin(), a.vars.end());
        auto const mb = *std::min_element(b.vars.begin(), b.vars.end());
        if (ma != mb) { return ma < mb; }
        return static_cast<int>(a.id) < static_cast<int>(b.id);
    });
}

auto format_number(double v) -> std::string
{
    if (v == 0.0) { return "0"; }
    auto s = fmt::format("{}", v);
    if (v < 0.0) { return "(" + s + ")"; }
    return s;
}

auto render_factor(FittedFactor const& f, std::span<const std::string> names) -> std::string
{
    auto const& p = f.params;
    auto const n = [&](double v) { return format_number(v); };
    auto const var = [&](std::size_t i) { return names[static_cast<std::size_t>(f.vars[i])]; };
    std::string body;
    switch (f.id) {
    case TemplateId::U1: body = fmt::format("{}^{}", var(0), n(p[0])); break;
    case TemplateId::U2: body = fmt::format("exp({}*{})", n(p[0]), var(0)); break;
    case TemplateId::U3: {
        constexpr double half_pi = std::numbers::pi / 2.0;
        if (std::abs(p[1] - half_pi) < 0.25) {
            body = fmt::format("cos({}*{} + {})", n(p[0]), var(0), n(p[1] - half_pi));
        } else {
            body = fmt::format("sin({}*{} + {})", n(p[0]), var(0), n(p[1]));
        }
        break;
    }
    case TemplateId::U4: body = fmt::format("ln({}*{} + {})", n(p[0]), var(0), n(p[1])); break;
    case TemplateId::B1: body = fmt::format("({}*{} + {}*{})", n(p[0]), var(0), n(p[1]), var(1)); break;
    case TemplateId::B2: body = fmt::format("exp({}*{}*{})", n(p[0]), var(0), var(1)); break;
    case TemplateId::B3: {
        auto const r = fmt::format("({}/{})", var(0), var(1));
        body = fmt::format("({}^{} + {}*{}^{} + {})", r, n(p[0]), n(p[1]), r, n(p[2]), n(p[3]));
        break;
    }
    case TemplateId::B4:
        body = fmt::format("sin({}*{} + {}*{} + {}*{}*{} + {})", n(p[0]), var(0), n(p[1]), var(1), n(p[2]), var(0), var(1), n(p[3]));
        break;
    case TemplateId::E1: body = fmt::format("ln({}*({}/{}) + {})", n(p[0]), var(0), var(1), n(p[1])); break;
    case TemplateId::E2: {
        auto const r = fmt::format("({}/{})", var(0), var(1));
        body = fmt::format("({}^{}*({}^{} + {}*{}^{} + {}))", var(1), n(p[0]), r, n(p[1]), n(p[2]), r, n(p[3]), n(p[4]));
        break;
    }
    }
    if (f.scale == 1.0 && f.offset == 0.0) { return body; }
    if (f.offset == 0.0) { return fmt::format("{}*{}", n(f.scale), body); }
    if (f.scale == 1.0) { return fmt::format("({} + {})", body, n(f.offset)); }
    return fmt::format("({}*{} + {})", n(f.scale), body, n(f.offset));
}

auto render_model(GSModel const& model, std::span<const std::string> names) -> std::string
{
    if (names.size() != model.n_vars) { throw std::invalid_argument("variable name count does not match model"); }
    std::vector<std::string> terms;
    if (model.c[0] != 0.0 || model.blocks.empty()) { terms.push_back(format_number(model.c[0])); }
    for (std::size_t i = 0; i < model.blocks.size(); ++i) {
        if (model.c[i + 1] == 0.0) { continue; }
        std::string term = format_number(model.c[i + 1]);
        for (auto const& f : model.blocks[i]) { term += " * " + render_factor(f, names); }
        terms.push_back(std::move(term));
    }
    if (terms.empty()) { return "0"; }
    std::string out = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i) { out += " + " + terms[i]; }
    return out;
}

} // namespace sepsys

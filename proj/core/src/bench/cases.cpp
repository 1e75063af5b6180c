#include "sepsys/bench/cases.hpp"

#include <algorithm>
#include <memory>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sepsys/bench/expression.hpp"
#include "sepsys/structure.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace sepsys {

namespace {

using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;
using X = std::span<const double>;

auto uniform_box(std::size_t n, double lo, double hi) -> BoxDomain
{
    return BoxDomain(std::vector<std::pair<double, double>>(n, { lo, hi }));
}

auto one_based(std::initializer_list<int> vars) -> VarSet
{
    VarSet out;
    for (auto v : vars) { out.push_back(v - 1); }
    return make_varset(out);
}

auto nozzle_constant(double gamma, double r_gas) -> double
{
    return 1e5 * sqrt(gamma / r_gas * std::pow(2.0 / (gamma + 1.0), (gamma + 1.0) / (gamma - 1.0)));
}

auto build() -> std::vector<CaseSpec>
{
    std::vector<CaseSpec> cases;
    auto toy = [&](std::string id, std::size_t n, Target::Fn fn, std::string formula, ExpectedStructure expected) {
        CaseSpec c;
        c.id = std::move(id);
        c.title = "toy case " + c.id;
        c.var_names = default_names(n);
        c.domain = uniform_box(n, -3.0, 3.0);
        c.fn = std::move(fn);
        c.formula = std::move(formula);
        c.eps_target = 1e-6;
        c.expected = std::move(expected);
        cases.push_back(std::move(c));
    };

    toy("1", 2, [](X x) { return 0.5 * exp(x[0]) * sin(2 * x[1]); },
        "0.5*exp(x1)*sin(2*x2)", { {}, 1, 2 });
    toy("2", 3, [](X x) { return 2 * cos(x[0]) + sin(3 * x[1] - x[2]); },
        "2*cos(x1) + sin(3*x2 - x3)", { {}, 2, 2 });
    toy("3", 3, [](X x) { return 1.2 + 10 * sin(2 * x[0]) - 3 * x[1] * x[1] * cos(x[2]); },
        "1.2 + 10*sin(2*x1) - 3*x2^2*cos(x3)", { {}, 2, 3 });
    toy("4", 3, [](X x) { return x[2] * sin(x[0]) - 2 * x[2] * cos(x[1]); },
        "x3*sin(x1) - 2*x3*cos(x2)", { one_based({ 3 }), 2, 4 });
    toy("5", 4, [](X x) { return 2 * x[0] * sin(x[1]) * cos(x[3]) - 0.5 * x[3] * cos(x[2]); },
        "2*x1*sin(x2)*cos(x4) - 0.5*x4*cos(x3)", { one_based({ 4 }), 2, 5 });
    toy("6", 5,
        [](X x) {
            return 10 + 0.2 * x[0] - 0.2 * x[4] * x[4] * sin(x[1]) + cos(x[4]) * log(3 * x[2] + 1.2) - 1.2 * exp(0.5 * x[3]);
        },
        "10 + 0.2*x1 - 0.2*x5^2*sin(x2) + cos(x5)*ln(3*x3 + 1.2) - 1.2*exp(0.5*x4)", { one_based({ 5 }), 4, 6 });
    cases.back().domain = uniform_box(5, 1.0, 4.0);
    cases.back().notes = "domain [1,4]; a narrower range [1,3] is also quoted for this problem";
    toy("7", 5, [](X x) { return 2 * x[3] * x[4] * sin(x[0]) - x[4] * x[1] + 0.5 * exp(x[2]) * cos(x[3]); },
        "2*x4*x5*sin(x1) - x5*x2 + 0.5*exp(x3)*cos(x4)", { one_based({ 4, 5 }), 3, 7 });
    toy("8", 5,
        [](X x) { return 1.2 + 2 * x[3] * cos(x[1]) + 0.5 * exp(1.2 * x[2]) * sin(3 * x[0]) * cos(x[3]) - 2 * cos(1.5 * x[4] + 5); },
        "1.2 + 2*x4*cos(x2) + 0.5*exp(1.2*x3)*sin(3*x1)*cos(x4) - 2*cos(1.5*x5 + 5)", { one_based({ 4 }), 3, 6 });
    toy("9", 6, [](X x) { return 0.5 * cos(x[2] * x[3]) / (exp(x[0]) * x[1] * x[1]) * sin(1.5 * x[4] - 2 * x[5]); },
        "0.5*cos(x3*x4)/(exp(x1)*x2^2)*sin(1.5*x5 - 2*x6)", { {}, 1, 4 });
    toy("10", 7, [](X x) { return 1.2 - 2 * (x[0] + x[1]) / x[2] * cos(x[6]) + 0.5 * exp(x[6]) * x[3] * sin(x[4] * x[5]); },
        "1.2 - 2*(x1 + x2)/x3*cos(x7) + 0.5*exp(x7)*x4*sin(x5*x6)", { one_based({ 7 }), 2, 6 });

    {
        CaseSpec c;
        c.id = "11";
        c.title = "choked nozzle mass flow";
        c.var_names = { "p0", "A_star", "T0" };
        c.domain = BoxDomain({ { 4, 6 }, { 0.5, 1.5 }, { 250, 260 } });
        c.constants = { { "gamma", 1.4 }, { "R", 287.0 } };
        auto const k = nozzle_constant(1.4, 287.0);
        c.constants["K"] = k;
        c.fn = [k](X x) { return k * x[0] * x[1] / sqrt(x[2]); };
        c.formula = "K*p0*A_star/sqrt(T0)";
        c.eps_target = 1e-8;
        c.expected = ExpectedStructure { {}, 1, 3 };
        c.notes = "K = 1e5*sqrt(gamma/R*(2/(gamma+1))^((gamma+1)/(gamma-1))) with gamma = 1.4, R = 287, about 4.04e3";
        cases.push_back(std::move(c));
    }
    {
        CaseSpec c;
        c.id = "12";
        c.title = "aircraft lift coefficient";
        c.var_names = { "CLa", "alpha", "CLde", "de", "S_HT", "S_ref" };
        c.domain = BoxDomain({ { 0.4, 0.8 }, { 5, 10 }, { 0.4, 0.8 }, { 5, 10 }, { 1, 1.5 }, { 5, 7 } });
        c.constants = { { "alpha0", -2.0 } };
        c.fn = [](X x) { return x[0] * (x[1] - 2) + x[2] * x[3] * x[4] / x[5]; };
        c.formula = "CLa*(alpha - 2) + CLde*de*S_HT/S_ref";
        c.eps_target = 1e-8;
        c.expected = ExpectedStructure { {}, 2, 6 };
        c.notes = "written as alpha - 2 following the dimensionless form; alpha0 = -2 would give alpha + 2";
        cases.push_back(std::move(c));
    }
    {
        CaseSpec c;
        c.id = "13";
        c.title = "flow past a rotating cylinder";
        c.var_names = { "V_inf", "theta", "Gamma", "R", "r" };
        c.domain = BoxDomain({ { 60, 65 }, { 30, 40 }, { 5, 10 }, { 0.5, 0.8 }, { 0.2, 0.5 } });
        c.constants = { { "inv_2pi", 1.0 / (2.0 * std::numbers::pi) } };
        c.fn = [](X x) {
            return x[0] * x[1] * x[4] * (1 - x[3] * x[3] / (x[4] * x[4])) + 1.0 / (2.0 * std::numbers::pi) * x[2] * log(x[4] / x[3]);
        };
        c.formula = "V_inf*theta*r*(1 - R^2/r^2) + inv_2pi*Gamma*ln(r/R)";
        c.eps_target = 1e-8;
        c.expected = ExpectedStructure { one_based({ 4, 5 }), 2, 6 };
        c.notes = "theta enters as a plain variable, as in the dimensionless form";
        cases.push_back(std::move(c));
    }
    {
        CaseSpec c;
        c.id = "14";
        c.title = "wing-canard maximum lift coefficient";
        c.var_names = default_names(18);
        c.domain = BoxDomain({
            { 0.4, 0.8 }, // x1
            { 3, 4 },     // x2
            { 20, 30 },   // x3
            { 2, 5 },     // x4
            { 1, 2 },     // x5
            { 1, 2 },     // x6
            { 0.5, 1.5 }, // x7
            { 1, 1.5 },   // x8
            { 1, 2 },     // x9
            { 0.5, 1.5 }, // x10
            { 1, 1.5 },   // x11
            { 1, 2 },     // x12
            { 2, 5 },     // x13
            { 1, 1.5 },   // x14
            { 5, 7 },     // x15
            { 2, 5 },     // x16
            { 1, 1.5 },   // x17
            { 10, 20 },   // x18
        });
        c.fn = [](X x) {
            auto const r = x[1] / x[2];
            auto const h = x[12] * x[13] / x[14];
            auto const k = x[15] * x[16] / x[14];
            return x[0] - 0.25 * x[3] * x[4] * x[5] * (4 + 0.1 * r - r * r) + h * x[17] * x[6] - h * x[7] + h * x[8]
                + k * x[17] * x[9] - k * x[10] + k * x[11];
        };
        c.formula = "x1 - 0.25*x4*x5*x6*(4 + 0.1*(x2/x3) - (x2/x3)^2) + x13*x14/x15*x18*x7 - x13*x14/x15*x8"
                    " + x13*x14/x15*x9 + x16*x17/x15*x18*x10 - x16*x17/x15*x11 + x16*x17/x15*x12";
        c.eps_target = 1e-8;
        c.expected = ExpectedStructure { one_based({ 13, 14, 15, 16, 17, 18 }), 8, 31 };
        c.notes = "x5, x6 ranges are not given and use [1,2]; x8, x11 use [1,1.5] from the dimensionless form";
        cases.push_back(std::move(c));
    }
    return cases;
}

} // namespace

auto case_registry() -> std::vector<CaseSpec> const&
{
    static auto const registry = build();
    return registry;
}

auto find_case(std::string const& id) -> CaseSpec const*
{
    for (auto const& c : case_registry()) {
        if (c.id == id) { return &c; }
    }
    return nullptr;
}

auto make_expression_case(std::string id, std::vector<std::string> var_names, BoxDomain domain,
    std::string const& expr, std::map<std::string, double> constants, double eps_target) -> CaseSpec
{
    if (domain.n() != var_names.size()) { throw std::invalid_argument("domain and variable list differ in length"); }
    auto parsed = std::make_shared<Expression>(parse_expression(expr, var_names, constants));
    CaseSpec c;
    c.id = std::move(id);
    c.title = "user expression";
    c.var_names = std::move(var_names);
    c.domain = std::move(domain);
    c.fn = [parsed](X x) { return parsed->eval(x); };
    c.formula = expr;
    c.constants = std::move(constants);
    c.eps_target = eps_target;
    return c;
}

auto load_problem_file(std::string const& path) -> CaseSpec
{
    std::ifstream in(path);
    if (!in) { throw std::invalid_argument("cannot open problem file '" + path + "'"); }
    nlohmann::json j;
    try {
        in >> j;
        std::vector<std::string> names;
        std::vector<std::pair<double, double>> bounds;
        for (auto const& v : j.at("vars")) {
            names.push_back(v.at("name").get<std::string>());
            bounds.emplace_back(v.at("lo").get<double>(), v.at("hi").get<double>());
        }
        std::map<std::string, double> constants;
        if (j.contains("constants")) {
            for (auto const& [k, v] : j.at("constants").items()) { constants[k] = v.get<double>(); }
        }
        auto const eps = j.value("eps_target", 1e-6);
        return make_expression_case(j.value("name", std::string("problem")), std::move(names), BoxDomain(std::move(bounds)),
            j.at("expr").get<std::string>(), std::move(constants), eps);
    } catch (nlohmann::json::exception const& e) {
        throw std::invalid_argument("malformed problem file '" + path + "': " + e.what());
    }
}

auto parse_case_list(std::string const& text) -> std::vector<int>
{
    std::vector<int> out;
    std::size_t pos = 0;
    auto number = [&](std::size_t& p) {
        std::size_t used = 0;
        auto const v = std::stoi(text.substr(p), &used);
        p += used;
        return v;
    };
    try {
        while (pos < text.size()) {
            auto const lo = number(pos);
            auto hi = lo;
            if (pos < text.size() && text[pos] == '-') {
                ++pos;
                hi = number(pos);
            }
            if (hi < lo) { throw std::invalid_argument("descending range"); }
            for (int v = lo; v <= hi; ++v) { out.push_back(v); }
            if (pos < text.size()) {
                if (text[pos] != ',') { throw std::invalid_argument("unexpected character"); }
                ++pos;
            }
        }
    } catch (std::logic_error const&) {
        throw std::invalid_argument("invalid case list '" + text + "'");
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty()) { throw std::invalid_argument("empty case list"); }
    return out;
}

} // namespace sepsys

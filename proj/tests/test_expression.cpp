#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "sepsys/bench/expression.hpp"
#include "sepsys/rng.hpp"

using namespace sepsys;

namespace {

auto value(std::string const& src, std::vector<std::string> const& names, std::vector<double> const& x) -> double
{
    return parse_expression(src, names).eval(x);
}

std::vector<std::string> const kXYZ { "x1", "x2", "x3" };

// Random expression over x1..x3 drawn from the full grammar.
auto random_source(Rng& rng, int depth) -> std::string
{
    if (depth == 0 || rng.below(4) == 0) {
        switch (rng.below(3)) {
        case 0: return "x" + std::to_string(1 + rng.below(3));
        case 1: return std::to_string(rng.below(9) + 1);
        default: return "0.25e1";
        }
    }
    static char const* const funcs[] = { "sin", "cos", "tan", "exp", "ln", "sqrt" };
    static char const* const ops[] = { " + ", " - ", " * ", " / ", "^" };
    switch (rng.below(3)) {
    case 0: return std::string(funcs[rng.below(6)]) + "(" + random_source(rng, depth - 1) + ")";
    case 1: return "-" + random_source(rng, depth - 1);
    default: return "(" + random_source(rng, depth - 1) + ops[rng.below(5)] + random_source(rng, depth - 1) + ")";
    }
}

} // namespace

TEST_CASE("documented examples")
{
    // 2*cos(0) + sin(0)
    CHECK(value("2*cos(x1) + sin(3*x2 - x3)", kXYZ, { 0, 0, 0 }) == 2.0);
    CHECK(value("x1^2", { "x1" }, { -3 }) == 9.0);
    std::vector<std::string> const five { "x1", "x2", "x3", "x4", "x5" };
    CHECK(value("ln(x5/x4)", five, { 0, 0, 0, 1.7, 1.7 }) == 0.0);
}

TEST_CASE("precedence and associativity")
{
    CHECK(value("1 + 2*3", {}, {}) == 7.0);
    CHECK(value("(1 + 2)*3", {}, {}) == 9.0);
    CHECK(value("8/4/2", {}, {}) == 1.0);
    CHECK(value("8 - 4 - 2", {}, {}) == 2.0);
    CHECK(value("2^3^2", {}, {}) == 512.0);
    CHECK(value("-2^2", {}, {}) == -4.0);
    CHECK(value("2^-1", {}, {}) == 0.5);
    CHECK(value("--3", {}, {}) == 3.0);
    CHECK(value("2*-x1", { "x1" }, { 4 }) == -8.0);
    CHECK(value("  x1*x1  ", { "x1" }, { 1.5 }) == 2.25);
}

TEST_CASE("literals and functions")
{
    CHECK(value("1.5e3", {}, {}) == 1500.0);
    CHECK(value("2E-2", {}, {}) == 0.02);
    CHECK(value(".5", {}, {}) == 0.5);
    CHECK(value("3.", {}, {}) == 3.0);
    CHECK(value("sqrt(16) + exp(0) + tan(0) + ln(1)", {}, {}) == 5.0);
    CHECK(value("cos(x1)", { "x1" }, { std::numbers::pi }) == doctest::Approx(-1.0));
    auto const e = parse_expression("inv_2pi*x1", { "x1" }, { { "inv_2pi", 1.0 / (2 * std::numbers::pi) } });
    std::vector<double> const x { 2 * std::numbers::pi };
    CHECK(e.eval(x) == doctest::Approx(1.0).epsilon(1e-15));
    auto const negc = parse_expression("x1 + a", { "x1" }, { { "a", -2.0 } });
    CHECK(negc.eval(std::vector<double> { 5.0 }) == 3.0);
}

TEST_CASE("variables shadow constants of the same name")
{
    auto const e = parse_expression("R", { "R" }, { { "R", 287.0 } });
    CHECK(e.eval(std::vector<double> { 0.5 }) == 0.5);
}

TEST_CASE("parse errors report position and expectations")
{
    try {
        (void)parse_expression("x1 + * x2", kXYZ);
        FAIL("expected ParseError");
    } catch (ParseError const& e) {
        CHECK(e.position() == 5);
        CHECK(e.expected().contains("number"));
        CHECK(e.expected().contains("identifier"));
        CHECK(e.expected().contains("'('"));
    }
    try {
        (void)parse_expression("sin(x1", kXYZ);
        FAIL("expected ParseError");
    } catch (ParseError const& e) {
        CHECK(e.position() == 6);
        CHECK(e.expected() == std::set<std::string> { "')'" });
    }
    try {
        (void)parse_expression("x1 x2", kXYZ);
        FAIL("expected ParseError");
    } catch (ParseError const& e) {
        CHECK(e.position() == 3);
        CHECK(e.expected().contains("end of input"));
    }
    CHECK_THROWS_AS((void)parse_expression("", kXYZ), ParseError);
    CHECK_THROWS_AS((void)parse_expression("1..2", kXYZ), ParseError);
}

TEST_CASE("unknown names")
{
    try {
        (void)parse_expression("x1 + y", kXYZ);
        FAIL("expected UnknownIdentifier");
    } catch (UnknownIdentifier const& e) {
        CHECK(e.position() == 5);
        CHECK(e.name() == "y");
    }
    try {
        (void)parse_expression("log(x1)", kXYZ);
        FAIL("expected UnknownIdentifier");
    } catch (UnknownIdentifier const& e) {
        CHECK(e.position() == 0);
        CHECK(e.name() == "log");
    }
}

TEST_CASE("render then parse gives the same tree")
{
    Rng rng(3);
    for (int k = 0; k < 500; ++k) {
        auto const src = random_source(rng, 4);
        CAPTURE(src);
        auto const a = parse_expression(src, kXYZ);
        auto const text = a.render();
        auto const b = parse_expression(text, kXYZ);
        CHECK(a == b);
        CHECK(b.render() == text);
    }
}

TEST_CASE("evaluation matches the math library")
{
    Rng rng(4);
    auto const e = parse_expression("x1*sin(x2)^2 - exp(-x3)/sqrt(x1) + ln(x2)*tan(x3)", kXYZ);
    for (int k = 0; k < 100; ++k) {
        std::vector<double> const x { rng.uniform(0.5, 2), rng.uniform(0.5, 2), rng.uniform(-1, 1) };
        auto const want = x[0] * std::pow(std::sin(x[1]), 2) - std::exp(-x[2]) / std::sqrt(x[0]) + std::log(x[1]) * std::tan(x[2]);
        CHECK(e.eval(x) == doctest::Approx(want).epsilon(1e-14));
    }
}

#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sepsys/errors.hpp"

namespace sepsys {

class ParseError : public Error {
public:
    ParseError(std::size_t position, std::set<std::string> expected, std::string const& found);

    [[nodiscard]] auto position() const noexcept -> std::size_t { return position_; }
    [[nodiscard]] auto expected() const -> std::set<std::string> const& { return expected_; }

private:
    std::size_t position_;
    std::set<std::string> expected_;
};

class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(std::size_t position, std::string name);

    [[nodiscard]] auto position() const noexcept -> std::size_t { return position_; }
    [[nodiscard]] auto name() const -> std::string const& { return name_; }

private:
    std::size_t position_;
    std::string name_;
};

enum class Func { Sin, Cos, Tan, Exp, Ln, Sqrt };

struct ExprNode {
    enum class Kind { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };
    Kind kind { Kind::Number };
    double value { 0.0 }; // Number
    int var { -1 };       // Variable
    Func func { Func::Sin };
    int lhs { -1 }; // operand of Neg / Call, left of binary
    int rhs { -1 };
};

// Parsed closed-form expression stored as an index-linked node array.
class Expression {
public:
    Expression() = default;
    Expression(std::vector<ExprNode> nodes, int root, std::vector<std::string> var_names);

    [[nodiscard]] auto eval(std::span<const double> x) const -> double;
    [[nodiscard]] auto render() const -> std::string;
    [[nodiscard]] auto var_names() const -> std::vector<std::string> const& { return names_; }
    [[nodiscard]] auto nodes() const -> std::vector<ExprNode> const& { return nodes_; }
    [[nodiscard]] auto root() const -> int { return root_; }

    // Structural equality, independent of node storage order.
    friend auto operator==(Expression const& a, Expression const& b) -> bool;

private:
    [[nodiscard]] auto eval_node(int i, std::span<const double> x) const -> double;
    [[nodiscard]] auto render_node(int i) const -> std::string;

    std::vector<ExprNode> nodes_;
    int root_ { -1 };
    std::vector<std::string> names_;
};

// Grammar (highest binding first): literals, names, calls and
// parentheses; right-associative ^; unary minus; * and /; + and -.
// Functions: sin cos tan exp ln sqrt. Names in `constants` become
// numbers; any other name must be in var_names.
[[nodiscard]] auto parse_expression(std::string const& src, std::vector<std::string> const& var_names,
    std::map<std::string, double> const& constants = {}) -> Expression;

} // namespace sepsys

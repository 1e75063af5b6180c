#include "sepsys/bench/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include <fmt/format.h>

namespace sepsys {

namespace {

auto join(std::set<std::string> const& items) -> std::string
{
    std::string out;
    for (auto const& s : items) {
        if (!out.empty()) { out += ", "; }
        out += s;
    }
    return out;
}

struct FuncName {
    char const* name;
    Func func;
};

constexpr FuncName kFuncs[] = {
    { "sin", Func::Sin }, { "cos", Func::Cos }, { "tan", Func::Tan },
    { "exp", Func::Exp }, { "ln", Func::Ln }, { "sqrt", Func::Sqrt },
};

auto func_name(Func f) -> char const*
{
    for (auto const& fn : kFuncs) {
        if (fn.func == f) { return fn.name; }
    }
    return "?";
}

class Parser {
public:
    Parser(std::string const& src, std::vector<std::string> const& names, std::map<std::string, double> const& constants)
        : src_(src), names_(names), constants_(constants)
    {
    }

    auto run() -> Expression
    {
        skip_space();
        if (pos_ >= src_.size()) { fail({ "expression" }); }
        auto const root = expr();
        skip_space();
        if (pos_ < src_.size()) { fail({ "'+'", "'-'", "'*'", "'/'", "'^'", "end of input" }); }
        return Expression(std::move(nodes_), root, names_);
    }

private:
    auto add(ExprNode n) -> int
    {
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size() - 1);
    }

    auto binary(ExprNode::Kind k, int l, int r) -> int
    {
        ExprNode n;
        n.kind = k;
        n.lhs = l;
        n.rhs = r;
        return add(n);
    }

    void skip_space()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])) != 0) { ++pos_; }
    }

    auto peek() -> char
    {
        skip_space();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    [[noreturn]] void fail(std::set<std::string> expected)
    {
        std::string found = pos_ < src_.size() ? std::string("'") + src_[pos_] + "'" : "end of input";
        throw ParseError(pos_, std::move(expected), found);
    }

    auto expr() -> int
    {
        auto lhs = term();
        while (true) {
            auto const c = peek();
            if (c != '+' && c != '-') { return lhs; }
            ++pos_;
            auto const rhs = term();
            lhs = binary(c == '+' ? ExprNode::Kind::Add : ExprNode::Kind::Sub, lhs, rhs);
        }
    }

    auto term() -> int
    {
        auto lhs = unary();
        while (true) {
            auto const c = peek();
            if (c != '*' && c != '/') { return lhs; }
            ++pos_;
            auto const rhs = unary();
            lhs = binary(c == '*' ? ExprNode::Kind::Mul : ExprNode::Kind::Div, lhs, rhs);
        }
    }

    auto unary() -> int
    {
        if (peek() == '-') {
            ++pos_;
            ExprNode n;
            n.kind = ExprNode::Kind::Neg;
            n.lhs = unary();
            return add(n);
        }
        return power();
    }

    auto power() -> int
    {
        auto const base = primary();
        if (peek() == '^') {
            ++pos_;
            auto const exponent = unary();
            return binary(ExprNode::Kind::Pow, base, exponent);
        }
        return base;
    }

    auto number() -> int
    {
        auto const start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) != 0 || src_[pos_] == '.')) { ++pos_; }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            auto probe = pos_ + 1;
            if (probe < src_.size() && (src_[probe] == '+' || src_[probe] == '-')) { ++probe; }
            if (probe < src_.size() && std::isdigit(static_cast<unsigned char>(src_[probe])) != 0) {
                pos_ = probe;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])) != 0) { ++pos_; }
            }
        }
        auto const text = src_.substr(start, pos_ - start);
        char* end = nullptr;
        auto const v = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size() || text == ".") {
            pos_ = start;
            fail({ "number" });
        }
        ExprNode n;
        n.kind = ExprNode::Kind::Number;
        n.value = v;
        return add(n);
    }

    auto constant(double v) -> int
    {
        if (!std::isfinite(v)) { throw std::invalid_argument("constants must be finite"); }
        ExprNode n;
        n.kind = ExprNode::Kind::Number;
        n.value = std::abs(v);
        auto const id = add(n);
        if (v >= 0.0) { return id; }
        ExprNode neg;
        neg.kind = ExprNode::Kind::Neg;
        neg.lhs = id;
        return add(neg);
    }

    auto primary() -> int
    {
        auto const c = peek();
        if (std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '.') { return number(); }
        if (c == '(') {
            ++pos_;
            auto const inner = expr();
            if (peek() != ')') { fail({ "')'" }); }
            ++pos_;
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
            auto const start = pos_;
            while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) != 0 || src_[pos_] == '_')) { ++pos_; }
            auto const name = src_.substr(start, pos_ - start);
            if (peek() == '(') {
                for (auto const& fn : kFuncs) {
                    if (name == fn.name) {
                        ++pos_;
                        ExprNode n;
                        n.kind = ExprNode::Kind::Call;
                        n.func = fn.func;
                        n.lhs = expr();
                        if (peek() != ')') { fail({ "')'" }); }
                        ++pos_;
                        return add(n);
                    }
                }
                throw UnknownIdentifier(start, name);
            }
            for (std::size_t i = 0; i < names_.size(); ++i) {
                if (names_[i] == name) {
                    ExprNode n;
                    n.kind = ExprNode::Kind::Variable;
                    n.var = static_cast<int>(i);
                    return add(n);
                }
            }
            if (auto it = constants_.find(name); it != constants_.end()) { return constant(it->second); }
            throw UnknownIdentifier(start, name);
        }
        fail({ "number", "identifier", "'('", "'-'" });
    }

    std::string const& src_;
    std::vector<std::string> const& names_;
    std::map<std::string, double> const& constants_;
    std::size_t pos_ { 0 };
    std::vector<ExprNode> nodes_;
};

auto precedence(ExprNode::Kind k) -> int
{
    switch (k) {
    case ExprNode::Kind::Add:
    case ExprNode::Kind::Sub: return 1;
    case ExprNode::Kind::Mul:
    case ExprNode::Kind::Div: return 2;
    case ExprNode::Kind::Neg: return 3;
    case ExprNode::Kind::Pow: return 4;
    default: return 5;
    }
}

auto nodes_equal(std::vector<ExprNode> const& a, int ia, std::vector<ExprNode> const& b, int ib) -> bool
{
    if ((ia < 0) != (ib < 0)) { return false; }
    if (ia < 0) { return true; }
    auto const& x = a[static_cast<std::size_t>(ia)];
    auto const& y = b[static_cast<std::size_t>(ib)];
    if (x.kind != y.kind) { return false; }
    switch (x.kind) {
    case ExprNode::Kind::Number: return x.value == y.value;
    case ExprNode::Kind::Variable: return x.var == y.var;
    case ExprNode::Kind::Call:
        if (x.func != y.func) { return false; }
        break;
    default: break;
    }
    return nodes_equal(a, x.lhs, b, y.lhs) && nodes_equal(a, x.rhs, b, y.rhs);
}

} // namespace

ParseError::ParseError(std::size_t position, std::set<std::string> expected, std::string const& found)
    : Error(fmt::format("parse error at position {}: expected {}, found {}", position, join(expected), found))
    , position_(position)
    , expected_(std::move(expected))
{
}

UnknownIdentifier::UnknownIdentifier(std::size_t position, std::string name)
    : Error(fmt::format("unknown identifier '{}' at position {}", name, position))
    , position_(position)
    , name_(std::move(name))
{
}

Expression::Expression(std::vector<ExprNode> nodes, int root, std::vector<std::string> var_names)
    : nodes_(std::move(nodes)), root_(root), names_(std::move(var_names))
{
}

auto Expression::eval(std::span<const double> x) const -> double
{
    if (x.size() != names_.size()) { throw std::invalid_argument("input length does not match expression variables"); }
    return eval_node(root_, x);
}

auto Expression::eval_node(int i, std::span<const double> x) const -> double
{
    auto const& n = nodes_[static_cast<std::size_t>(i)];
    switch (n.kind) {
    case ExprNode::Kind::Number: return n.value;
    case ExprNode::Kind::Variable: return x[static_cast<std::size_t>(n.var)];
    case ExprNode::Kind::Neg: return -eval_node(n.lhs, x);
    case ExprNode::Kind::Add: return eval_node(n.lhs, x) + eval_node(n.rhs, x);
    case ExprNode::Kind::Sub: return eval_node(n.lhs, x) - eval_node(n.rhs, x);
    case ExprNode::Kind::Mul: return eval_node(n.lhs, x) * eval_node(n.rhs, x);
    case ExprNode::Kind::Div: return eval_node(n.lhs, x) / eval_node(n.rhs, x);
    case ExprNode::Kind::Pow: return std::pow(eval_node(n.lhs, x), eval_node(n.rhs, x));
    case ExprNode::Kind::Call: {
        auto const a = eval_node(n.lhs, x);
        switch (n.func) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Tan: return std::tan(a);
        case Func::Exp: return std::exp(a);
        case Func::Ln: return std::log(a);
        case Func::Sqrt: return std::sqrt(a);
        }
    }
    }
    return NAN;
}

auto Expression::render() const -> std::string { return root_ < 0 ? std::string() : render_node(root_); }

auto Expression::render_node(int i) const -> std::string
{
    auto const& n = nodes_[static_cast<std::size_t>(i)];
    auto wrap = [&](int child, int min_prec) {
        auto s = render_node(child);
        return precedence(nodes_[static_cast<std::size_t>(child)].kind) < min_prec ? "(" + s + ")" : s;
    };
    switch (n.kind) {
    case ExprNode::Kind::Number: return n.value < 0.0 ? fmt::format("({})", n.value) : fmt::format("{}", n.value);
    case ExprNode::Kind::Variable: return names_[static_cast<std::size_t>(n.var)];
    case ExprNode::Kind::Neg: return "-" + wrap(n.lhs, 3);
    case ExprNode::Kind::Add: return wrap(n.lhs, 1) + " + " + wrap(n.rhs, 2);
    case ExprNode::Kind::Sub: return wrap(n.lhs, 1) + " - " + wrap(n.rhs, 2);
    case ExprNode::Kind::Mul: return wrap(n.lhs, 2) + "*" + wrap(n.rhs, 3);
    case ExprNode::Kind::Div: return wrap(n.lhs, 2) + "/" + wrap(n.rhs, 3);
    case ExprNode::Kind::Pow: return wrap(n.lhs, 5) + "^" + wrap(n.rhs, 3);
    case ExprNode::Kind::Call: return std::string(func_name(n.func)) + "(" + render_node(n.lhs) + ")";
    }
    return {};
}

auto operator==(Expression const& a, Expression const& b) -> bool
{
    return a.names_ == b.names_ && nodes_equal(a.nodes_, a.root_, b.nodes_, b.root_);
}

auto parse_expression(std::string const& src, std::vector<std::string> const& var_names,
    std::map<std::string, double> const& constants) -> Expression
{
    return Parser(src, var_names, constants).run();
}

} // namespace sepsys

#pragma once

// Scalar coefficient expressions in the variables x and t.
//
// Grammar (standard infix precedence, binary operators left-associative):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' primary)*          exponent: integer constant
//   primary := number | 'x' | 't' | 'pi' | name '(' expr (',' expr)* ')'
//            | '(' expr ')'
//
// Functions: sin cos exp tanh abs min max, and bump(s, s0, s1) which is 1 for
// s <= s0, 0 for s >= s1 and 1 - (3r^2 - 2r^3), r = (s - s0)/(s1 - s0), between.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hypstrip {

enum class Var { x, t };

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t column, std::vector<std::string> expected = {});
    /// 1-based column of the offending character.
    std::size_t column() const noexcept { return column_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t column_;
    std::vector<std::string> expected_;
};

/// Division by zero, non-finite results and invalid bump intervals.
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when differentiating abs/min/max.
class DiffError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Op {
    constant,
    pi,
    var_x,
    var_t,
    add,
    sub,
    mul,
    div,
    neg,
    pow,
    sin,
    cos,
    exp,
    tanh,
    abs,
    min,
    max,
    bump,
};

struct ExprNode;

/// Immutable expression tree. Copies share structure; evaluation is pure.
class Expr {
public:
    Expr();  // the constant 0
    explicit Expr(double value);

    static Expr variable(Var v);
    static Expr pi();
    static Expr unary(Op op, Expr arg);
    static Expr binary(Op op, Expr lhs, Expr rhs);
    static Expr power(Expr base, int exponent);
    static Expr bump(Expr s, Expr s0, Expr s1);

    double eval(double x, double t) const;

    /// Symbolic derivative. Throws DiffError on abs/min/max.
    Expr diff(Var v) const;

    /// Replaces every occurrence of the variable by `with`.
    Expr substitute(Var v, const Expr& with) const;

    bool depends_on(Var v) const;
    bool is_constant() const { return !depends_on(Var::x) && !depends_on(Var::t); }
    /// Value of a variable-free expression.
    std::optional<double> constant_value() const;
    bool is_zero() const;

    /// Infix text that parses back to a tree with identical evaluation.
    std::string str() const;

    Op op() const;
    const ExprNode& node() const { return *node_; }

private:
    explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
    static Expr seal(std::shared_ptr<ExprNode> node);
    std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
    Op op = Op::constant;
    double value = 0.0;   // constant
    int exponent = 0;     // pow
    std::vector<Expr> args;
    bool has_x = false;
    bool has_t = false;
    bool folded = false;  // variable-free: `cached` holds the value
    double cached = 0.0;
};

Expr parse(std::string_view src);

// Simplifying constructors used by the derivative rules and case generators.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

}  // namespace hypstrip

#include "hypstrip/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace hypstrip {

ParseError::ParseError(const std::string& message, std::size_t column, std::vector<std::string> expected)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "column " << column << ": " << message;
          if (!expected.empty()) {
              os << " (expected ";
              for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? ", " : "") << expected[i];
              os << ")";
          }
          return os.str();
      }()),
      column_(column),
      expected_(std::move(expected)) {}

namespace {

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw EvalError(std::string("non-finite result in ") + what);
    return v;
}

double bump_value(double s, double s0, double s1) {
    if (!(s1 > s0)) throw EvalError("bump requires s0 < s1");
    if (s <= s0) return 1.0;
    if (s >= s1) return 0.0;
    const double r = (s - s0) / (s1 - s0);
    return 1.0 - r * r * (3.0 - 2.0 * r);
}

double eval_node(const ExprNode& n, double x, double t);

double arg(const ExprNode& n, std::size_t i, double x, double t) { return eval_node(n.args[i].node(), x, t); }

double eval_node(const ExprNode& n, double x, double t) {
    if (n.folded) return n.cached;
    switch (n.op) {
        case Op::constant: return n.value;
        case Op::pi: return std::numbers::pi;
        case Op::var_x: return x;
        case Op::var_t: return t;
        case Op::add: return checked(arg(n, 0, x, t) + arg(n, 1, x, t), "+");
        case Op::sub: return checked(arg(n, 0, x, t) - arg(n, 1, x, t), "-");
        case Op::mul: return checked(arg(n, 0, x, t) * arg(n, 1, x, t), "*");
        case Op::div: {
            const double num = arg(n, 0, x, t);
            const double den = arg(n, 1, x, t);
            if (den == 0.0) throw EvalError("division by zero");
            return checked(num / den, "/");
        }
        case Op::neg: return -arg(n, 0, x, t);
        case Op::pow: {
            const double base = arg(n, 0, x, t);
            if (n.exponent < 0 && base == 0.0) throw EvalError("division by zero in negative power");
            double r = 1.0;
            double b = base;
            unsigned e = static_cast<unsigned>(n.exponent < 0 ? -n.exponent : n.exponent);
            while (e) {
                if (e & 1u) r *= b;
                b *= b;
                e >>= 1u;
            }
            return checked(n.exponent < 0 ? 1.0 / r : r, "^");
        }
        case Op::sin: return std::sin(arg(n, 0, x, t));
        case Op::cos: return std::cos(arg(n, 0, x, t));
        case Op::exp: return checked(std::exp(arg(n, 0, x, t)), "exp");
        case Op::tanh: return std::tanh(arg(n, 0, x, t));
        case Op::abs: return std::abs(arg(n, 0, x, t));
        case Op::min: return std::min(arg(n, 0, x, t), arg(n, 1, x, t));
        case Op::max: return std::max(arg(n, 0, x, t), arg(n, 1, x, t));
        case Op::bump: return bump_value(arg(n, 0, x, t), arg(n, 1, x, t), arg(n, 2, x, t));
    }
    throw EvalError("corrupt expression node");
}

std::shared_ptr<ExprNode> make_node(Op op, std::vector<Expr> args) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->args = std::move(args);
    for (const auto& a : n->args) {
        n->has_x = n->has_x || a.node().has_x;
        n->has_t = n->has_t || a.node().has_t;
    }
    return n;
}

const char* function_name(Op op) {
    switch (op) {
        case Op::sin: return "sin";
        case Op::cos: return "cos";
        case Op::exp: return "exp";
        case Op::tanh: return "tanh";
        case Op::abs: return "abs";
        case Op::min: return "min";
        case Op::max: return "max";
        case Op::bump: return "bump";
        default: return nullptr;
    }
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void print(const ExprNode& n, std::string& out) {
    switch (n.op) {
        case Op::constant: {
            const std::string s = format_number(n.value);
            if (n.value < 0 || std::signbit(n.value)) out += "(" + s + ")";
            else out += s;
            return;
        }
        case Op::pi: out += "pi"; return;
        case Op::var_x: out += "x"; return;
        case Op::var_t: out += "t"; return;
        case Op::add:
        case Op::sub:
        case Op::mul:
        case Op::div: {
            const char sym = n.op == Op::add ? '+' : n.op == Op::sub ? '-' : n.op == Op::mul ? '*' : '/';
            out += "(";
            print(n.args[0].node(), out);
            out += " ";
            out += sym;
            out += " ";
            print(n.args[1].node(), out);
            out += ")";
            return;
        }
        case Op::neg:
            out += "(-";
            print(n.args[0].node(), out);
            out += ")";
            return;
        case Op::pow:
            out += "(";
            print(n.args[0].node(), out);
            out += "^(" + std::to_string(n.exponent) + "))";
            return;
        default: {
            out += function_name(n.op);
            out += "(";
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i) out += ", ";
                print(n.args[i].node(), out);
            }
            out += ")";
            return;
        }
    }
}

}  // namespace

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double value) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::constant;
    n->value = value;
    n->folded = true;
    n->cached = value;
    node_ = std::move(n);
}

Expr Expr::variable(Var v) {
    auto n = std::make_shared<ExprNode>();
    n->op = v == Var::x ? Op::var_x : Op::var_t;
    n->has_x = v == Var::x;
    n->has_t = v == Var::t;
    return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
}

Expr Expr::pi() {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::pi;
    n->folded = true;
    n->cached = std::numbers::pi;
    return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
}

// Variable-free subtrees are evaluated once; failures stay deferred to eval().
Expr Expr::seal(std::shared_ptr<ExprNode> n) {
    if (!n->has_x && !n->has_t) {
        try {
            n->cached = eval_node(*n, 0.0, 0.0);
            n->folded = true;
        } catch (const EvalError&) {
        }
    }
    return Expr(std::shared_ptr<const ExprNode>(std::move(n)));
}

Expr Expr::unary(Op op, Expr a) {
    return seal(make_node(op, {std::move(a)}));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
    return seal(make_node(op, {std::move(lhs), std::move(rhs)}));
}

Expr Expr::power(Expr base, int exponent) {
    auto n = make_node(Op::pow, {std::move(base)});
    n->exponent = exponent;
    return seal(std::move(n));
}

Expr Expr::bump(Expr s, Expr s0, Expr s1) {
    return seal(make_node(Op::bump, {std::move(s), std::move(s0), std::move(s1)}));
}

double Expr::eval(double x, double t) const { return eval_node(*node_, x, t); }

bool Expr::depends_on(Var v) const { return v == Var::x ? node_->has_x : node_->has_t; }

std::optional<double> Expr::constant_value() const {
    if (node_->folded) return node_->cached;
    return std::nullopt;
}

bool Expr::is_zero() const {
    auto c = constant_value();
    return c && *c == 0.0;
}

Op Expr::op() const { return node_->op; }

std::string Expr::str() const {
    std::string out;
    print(*node_, out);
    return out;
}

// ---------------------------------------------------------------------------
// Simplifying arithmetic

namespace {
bool is_literal(const Expr& e, double v) { return e.op() == Op::constant && e.node().value == v; }
}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
    if (is_literal(a, 0.0)) return b;
    if (is_literal(b, 0.0)) return a;
    if (a.op() == Op::constant && b.op() == Op::constant) return Expr(a.node().value + b.node().value);
    return Expr::binary(Op::add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
    if (is_literal(b, 0.0)) return a;
    if (is_literal(a, 0.0)) return -b;
    if (a.op() == Op::constant && b.op() == Op::constant) return Expr(a.node().value - b.node().value);
    return Expr::binary(Op::sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
    if (is_literal(a, 0.0) || is_literal(b, 0.0)) return Expr(0.0);
    if (is_literal(a, 1.0)) return b;
    if (is_literal(b, 1.0)) return a;
    if (a.op() == Op::constant && b.op() == Op::constant) return Expr(a.node().value * b.node().value);
    return Expr::binary(Op::mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
    if (is_literal(b, 1.0)) return a;
    if (is_literal(a, 0.0) && !is_literal(b, 0.0)) return Expr(0.0);
    return Expr::binary(Op::div, a, b);
}

Expr operator-(const Expr& a) {
    if (a.op() == Op::constant) return Expr(-a.node().value);
    if (a.op() == Op::neg) return a.node().args[0];
    return Expr::unary(Op::neg, a);
}

// ---------------------------------------------------------------------------
// Derivatives

Expr Expr::diff(Var v) const {
    const ExprNode& n = *node_;
    if (!depends_on(v)) return Expr(0.0);
    const auto& a = n.args;
    switch (n.op) {
        case Op::constant:
        case Op::pi: return Expr(0.0);
        case Op::var_x: return Expr(v == Var::x ? 1.0 : 0.0);
        case Op::var_t: return Expr(v == Var::t ? 1.0 : 0.0);
        case Op::add: return a[0].diff(v) + a[1].diff(v);
        case Op::sub: return a[0].diff(v) - a[1].diff(v);
        case Op::mul: return a[0].diff(v) * a[1] + a[0] * a[1].diff(v);
        case Op::div: {
            // (u'w - u w') / w^2
            const Expr num = a[0].diff(v) * a[1] - a[0] * a[1].diff(v);
            return num / Expr::power(a[1], 2);
        }
        case Op::neg: return -a[0].diff(v);
        case Op::pow: {
            const int e = n.exponent;
            if (e == 0) return Expr(0.0);
            const Expr inner = e - 1 == 1 ? a[0] : (e - 1 == 0 ? Expr(1.0) : Expr::power(a[0], e - 1));
            return Expr(static_cast<double>(e)) * inner * a[0].diff(v);
        }
        case Op::sin: return Expr::unary(Op::cos, a[0]) * a[0].diff(v);
        case Op::cos: return -(Expr::unary(Op::sin, a[0]) * a[0].diff(v));
        case Op::exp: return *this * a[0].diff(v);
        case Op::tanh: return (Expr(1.0) - Expr::power(*this, 2)) * a[0].diff(v);
        case Op::abs: throw DiffError("abs is not differentiable");
        case Op::min: throw DiffError("min is not differentiable");
        case Op::max: throw DiffError("max is not differentiable");
        case Op::bump: {
            if (a[1].depends_on(v) || a[2].depends_on(v))
                throw DiffError("bump bounds must not depend on the differentiation variable");
            // d/ds bump = -6 r (1 - r) / (s1 - s0) with r clamped to [0, 1].
            const Expr width = a[2] - a[1];
            const Expr r = Expr::binary(Op::min,
                                        Expr::binary(Op::max, (a[0] - a[1]) / width, Expr(0.0)),
                                        Expr(1.0));
            const Expr slope = Expr(-6.0) * r * (Expr(1.0) - r) / width;
            return slope * a[0].diff(v);
        }
    }
    throw DiffError("corrupt expression node");
}

Expr Expr::substitute(Var v, const Expr& with) const {
    const ExprNode& n = *node_;
    if (!depends_on(v)) return *this;
    if ((n.op == Op::var_x && v == Var::x) || (n.op == Op::var_t && v == Var::t)) return with;
    std::vector<Expr> args;
    args.reserve(n.args.size());
    for (const auto& a : n.args) args.push_back(a.substitute(v, with));
    auto m = make_node(n.op, std::move(args));
    m->exponent = n.exponent;
    m->value = n.value;
    return seal(std::move(m));
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expr run() {
        skip_ws();
        if (pos_ >= src_.size()) fail("empty expression", {"expression"});
        Expr e = expr();
        skip_ws();
        if (pos_ < src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'", {"operator", "end of input"});
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected = {}) const {
        throw ParseError(msg, pos_ + 1, std::move(expected));
    }

    void skip_ws() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr expr() {
        Expr lhs = term();
        for (;;) {
            if (accept('+')) lhs = lhs + term();
            else if (accept('-')) lhs = lhs - term();
            else return lhs;
        }
    }

    Expr term() {
        Expr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = lhs * unary();
            else if (accept('/')) lhs = lhs / unary();
            else return lhs;
        }
    }

    Expr unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Expr power() {
        Expr base = primary();
        for (;;) {
            skip_ws();
            const std::size_t at = pos_;
            if (!accept('^')) return base;
            skip_ws();
            const bool negative = accept('-');
            if (!negative) accept('+');
            const Expr ex = primary();
            auto value = ex.constant_value();
            if (value && negative) value = -*value;
            if (!value || std::floor(*value) != *value || std::abs(*value) > 1024.0) {
                pos_ = at;
                fail("exponent must be an integer constant");
            }
            base = Expr::power(base, static_cast<int>(*value));
        }
    }

    Expr primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input", {"number", "identifier", "("});
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            if (!accept(')')) fail("unbalanced parenthesis", {")"});
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected character '" + std::string(1, c) + "'", {"number", "identifier", "("});
    }

    Expr number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                pos_ = p;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        double v = 0.0;
        const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != src_.data() + pos_) {
            pos_ = start;
            fail("malformed number", {"number"});
        }
        return Expr(v);
    }

    Expr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
        const std::string name(src_.substr(start, pos_ - start));
        if (name == "x") return Expr::variable(Var::x);
        if (name == "t") return Expr::variable(Var::t);
        if (name == "pi") return Expr::pi();

        struct Fn {
            const char* name;
            Op op;
            std::size_t arity;
        };
        static constexpr Fn fns[] = {
            {"sin", Op::sin, 1},   {"cos", Op::cos, 1}, {"exp", Op::exp, 1}, {"tanh", Op::tanh, 1},
            {"abs", Op::abs, 1},   {"min", Op::min, 2}, {"max", Op::max, 2}, {"bump", Op::bump, 3},
        };
        const Fn* fn = nullptr;
        for (const auto& f : fns)
            if (name == f.name) fn = &f;
        if (!fn) {
            pos_ = start;
            fail("unknown identifier '" + name + "'", {"x", "t", "pi", "function name"});
        }
        if (!accept('(')) fail("expected '(' after " + name, {"("});
        std::vector<Expr> args;
        args.push_back(expr());
        while (accept(',')) args.push_back(expr());
        if (!accept(')')) fail("expected ')' closing call to " + name, {",", ")"});
        if (args.size() != fn->arity) {
            pos_ = start;
            fail(name + " takes " + std::to_string(fn->arity) + " argument(s), got " + std::to_string(args.size()));
        }
        if (fn->op == Op::bump) return Expr::bump(args[0], args[1], args[2]);
        if (fn->arity == 2) return Expr::binary(fn->op, args[0], args[1]);
        return Expr::unary(fn->op, args[0]);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view src) { return Parser(src).run(); }

}  // namespace hypstrip

#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "tsfrac/detail/text.hpp"
#include "tsfrac/error.hpp"

namespace tsfrac {

enum class Op { constant, variable, negate, add, sub, mul, div, pow, exp, ln, sin, cos, abs };

/// Immutable expression tree over one variable `t`. Power nodes carry a
/// constant real exponent; nodes are shared between trees.
class Expr {
public:
    struct Node {
        Op op;
        double value = 0.0; // constant value, or exponent for Op::pow
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };

    Expr() : Expr(constant(0.0)) {}

    static Expr constant(double v) { return Expr(Node{Op::constant, v, nullptr, nullptr}); }
    static Expr variable() { return Expr(Node{Op::variable, 0.0, nullptr, nullptr}); }
    static Expr unary(Op op, const Expr& arg) { return Expr(Node{op, 0.0, arg.node_, nullptr}); }
    static Expr binary(Op op, const Expr& lhs, const Expr& rhs) { return Expr(Node{op, 0.0, lhs.node_, rhs.node_}); }
    static Expr power(const Expr& base, double exponent) { return Expr(Node{Op::pow, exponent, base.node_, nullptr}); }

    Op op() const { return node_->op; }
    double value() const { return node_->value; }
    Expr lhs() const { return Expr(node_->lhs); }
    Expr rhs() const { return Expr(node_->rhs); }

    bool is_constant() const { return op() == Op::constant; }
    bool is_constant(double v) const { return is_constant() && value() == v; }

    friend bool operator==(const Expr& x, const Expr& y);

private:
    explicit Expr(Node node) : node_(std::make_shared<const Node>(std::move(node))) {}
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    std::shared_ptr<const Node> node_;
};

inline bool is_unary(Op op) { return op == Op::negate || op == Op::pow || op >= Op::exp; }
inline bool is_binary(Op op) { return op == Op::add || op == Op::sub || op == Op::mul || op == Op::div; }

inline bool operator==(const Expr& x, const Expr& y)
{
    if (x.node_ == y.node_) return true;
    if (x.op() != y.op()) return false;
    switch (x.op()) {
    case Op::constant: return x.value() == y.value();
    case Op::variable: return true;
    case Op::pow: return x.value() == y.value() && x.lhs() == y.lhs();
    default: break;
    }
    if (is_binary(x.op())) return x.lhs() == y.lhs() && x.rhs() == y.rhs();
    return x.lhs() == y.lhs();
}

inline Expr operator+(const Expr& x, const Expr& y) { return Expr::binary(Op::add, x, y); }
inline Expr operator-(const Expr& x, const Expr& y) { return Expr::binary(Op::sub, x, y); }
inline Expr operator*(const Expr& x, const Expr& y) { return Expr::binary(Op::mul, x, y); }
inline Expr operator/(const Expr& x, const Expr& y) { return Expr::binary(Op::div, x, y); }
inline Expr operator-(const Expr& x) { return Expr::unary(Op::negate, x); }

namespace detail {

inline std::string_view function_name(Op op)
{
    switch (op) {
    case Op::exp: return "exp";
    case Op::ln: return "ln";
    case Op::sin: return "sin";
    case Op::cos: return "cos";
    case Op::abs: return "abs";
    default: return "";
    }
}

[[noreturn]] inline void domain_fail(const std::string& what, double t)
{
    throw error(errc::domain_error, what + " at t = " + format_number(t));
}

inline double eval_node(const Expr& e, double t)
{
    switch (e.op()) {
    case Op::constant: return e.value();
    case Op::variable: return t;
    case Op::negate: return -eval_node(e.lhs(), t);
    case Op::add: return eval_node(e.lhs(), t) + eval_node(e.rhs(), t);
    case Op::sub: return eval_node(e.lhs(), t) - eval_node(e.rhs(), t);
    case Op::mul: return eval_node(e.lhs(), t) * eval_node(e.rhs(), t);
    case Op::div: {
        double num = eval_node(e.lhs(), t);
        double den = eval_node(e.rhs(), t);
        if (den == 0.0) domain_fail("division by zero", t);
        return num / den;
    }
    case Op::pow: {
        double base = eval_node(e.lhs(), t);
        double k = e.value();
        if (base < 0.0 && std::floor(k) != k) domain_fail("non-integer power of a negative base", t);
        if (base == 0.0 && k < 0.0) domain_fail("negative power of zero", t);
        return std::pow(base, k);
    }
    case Op::exp: return std::exp(eval_node(e.lhs(), t));
    case Op::ln: {
        double x = eval_node(e.lhs(), t);
        if (!(x > 0.0)) domain_fail("ln of a nonpositive value", t);
        return std::log(x);
    }
    case Op::sin: return std::sin(eval_node(e.lhs(), t));
    case Op::cos: return std::cos(eval_node(e.lhs(), t));
    case Op::abs: return std::abs(eval_node(e.lhs(), t));
    }
    return 0.0;
}

inline bool has_variable(const Expr& e)
{
    if (e.op() == Op::variable) return true;
    if (e.op() == Op::constant) return false;
    if (is_binary(e.op())) return has_variable(e.lhs()) || has_variable(e.rhs());
    return has_variable(e.lhs());
}

inline bool has_abs(const Expr& e)
{
    if (e.op() == Op::abs) return true;
    if (e.op() == Op::constant || e.op() == Op::variable) return false;
    if (is_binary(e.op())) return has_abs(e.lhs()) || has_abs(e.rhs());
    return has_abs(e.lhs());
}

class ExprParser {
public:
    explicit ExprParser(std::string_view text) : cur_(text) {}

    Expr parse()
    {
        if (cur_.at_end()) cur_.fail("empty expression");
        Expr e = sum();
        if (!cur_.at_end()) cur_.fail("unexpected character");
        return e;
    }

private:
    Expr sum()
    {
        Expr e = product();
        for (;;) {
            if (cur_.consume('+'))
                e = e + product();
            else if (cur_.consume('-'))
                e = e - product();
            else
                return e;
        }
    }

    Expr product()
    {
        Expr e = unary();
        for (;;) {
            if (cur_.consume('*'))
                e = e * unary();
            else if (cur_.consume('/'))
                e = e / unary();
            else
                return e;
        }
    }

    Expr unary()
    {
        if (cur_.consume('-')) return -unary();
        if (cur_.consume('+')) return unary();
        return power();
    }

    Expr power()
    {
        Expr base = primary();
        if (!cur_.consume('^')) return base;
        std::size_t at = cur_.offset();
        Expr exponent = unary();
        auto k = fold(exponent);
        if (!k) cur_.fail_at("exponent must be a constant", at);
        return Expr::power(base, *k);
    }

    Expr primary()
    {
        if (auto v = cur_.number(false)) return Expr::constant(*v);
        if (cur_.consume('(')) {
            Expr e = sum();
            cur_.expect(')');
            return e;
        }
        std::size_t at = cur_.offset();
        std::string_view name = cur_.identifier();
        if (name.empty()) cur_.fail("expected an operand");
        if (name == "t") return Expr::variable();
        for (Op op : {Op::exp, Op::ln, Op::sin, Op::cos, Op::abs}) {
            if (name != function_name(op)) continue;
            cur_.expect('(');
            Expr arg = sum();
            cur_.expect(')');
            return Expr::unary(op, arg);
        }
        throw error(errc::unknown_identifier, "'" + std::string(name) + "' at offset " + std::to_string(at), at);
    }

    static std::optional<double> fold(const Expr& e)
    {
        if (has_variable(e)) return std::nullopt;
        try {
            return eval_node(e, 0.0);
        } catch (const error&) {
            return std::nullopt;
        }
    }

    Cursor cur_;
};

} // namespace detail

/// Parses the function grammar. Precedence, highest first: `^` (constant
/// exponent, right associative), unary minus, `* /`, `+ -`.
inline Expr parse_expr(std::string_view text) { return detail::ExprParser(text).parse(); }

/// Throws DomainError for ln of nonpositive values, division by zero,
/// non-integer powers of negative bases, and non-finite results.
inline double eval(const Expr& e, double t)
{
    double v = detail::eval_node(e, t);
    if (!std::isfinite(v)) detail::domain_fail("non-finite value", t);
    return v;
}

/// Constant folding plus removal of `*1`, `+0`, `-0` and `^1`.
inline Expr simplify(const Expr& e)
{
    switch (e.op()) {
    case Op::constant:
    case Op::variable: return e;
    default: break;
    }
    auto fold_if_constant = [](const Expr& x) -> Expr {
        if (detail::has_variable(x)) return x;
        try {
            return Expr::constant(eval(x, 0.0));
        } catch (const error&) {
            return x;
        }
    };
    if (is_binary(e.op())) {
        Expr a = simplify(e.lhs());
        Expr b = simplify(e.rhs());
        switch (e.op()) {
        case Op::add:
            if (a.is_constant(0.0)) return b;
            if (b.is_constant(0.0)) return a;
            break;
        case Op::sub:
            if (b.is_constant(0.0)) return a;
            if (a.is_constant(0.0)) return simplify(-b);
            break;
        case Op::mul:
            if (a.is_constant(1.0)) return b;
            if (b.is_constant(1.0)) return a;
            break;
        case Op::div:
            if (b.is_constant(1.0)) return a;
            break;
        default: break;
        }
        return fold_if_constant(Expr::binary(e.op(), a, b));
    }
    Expr a = simplify(e.lhs());
    if (e.op() == Op::pow) {
        if (e.value() == 1.0) return a;
        return fold_if_constant(Expr::power(a, e.value()));
    }
    if (e.op() == Op::negate && a.op() == Op::negate) return a.lhs();
    return fold_if_constant(Expr::unary(e.op(), a));
}

/// Parseable text; parse(to_string(e)) equals simplify(e) after simplification.
inline std::string to_string(const Expr& e)
{
    switch (e.op()) {
    case Op::constant: {
        auto s = detail::format_number(e.value());
        return e.value() < 0.0 ? "(" + s + ")" : s;
    }
    case Op::variable: return "t";
    case Op::negate: return "-(" + to_string(e.lhs()) + ")";
    case Op::add: return "(" + to_string(e.lhs()) + " + " + to_string(e.rhs()) + ")";
    case Op::sub: return "(" + to_string(e.lhs()) + " - " + to_string(e.rhs()) + ")";
    case Op::mul: return "(" + to_string(e.lhs()) + " * " + to_string(e.rhs()) + ")";
    case Op::div: return "(" + to_string(e.lhs()) + " / " + to_string(e.rhs()) + ")";
    case Op::pow: {
        std::string base = e.lhs().op() == Op::variable ? "t" : "(" + to_string(e.lhs()) + ")";
        auto k = detail::format_number(e.value());
        return base + "^" + (e.value() < 0.0 ? "(" + k + ")" : k);
    }
    default: return std::string(detail::function_name(e.op())) + "(" + to_string(e.lhs()) + ")";
    }
}

namespace detail {

inline Expr diff_node(const Expr& e)
{
    const Expr zero = Expr::constant(0.0);
    switch (e.op()) {
    case Op::constant: return zero;
    case Op::variable: return Expr::constant(1.0);
    case Op::negate: return -diff_node(e.lhs());
    case Op::add: return diff_node(e.lhs()) + diff_node(e.rhs());
    case Op::sub: return diff_node(e.lhs()) - diff_node(e.rhs());
    case Op::mul: {
        Expr u = e.lhs(), v = e.rhs();
        if (!has_variable(u)) return u * diff_node(v);
        if (!has_variable(v)) return diff_node(u) * v;
        return diff_node(u) * v + u * diff_node(v);
    }
    case Op::div: {
        Expr u = e.lhs(), v = e.rhs();
        if (!has_variable(v)) return diff_node(u) / v;
        return (diff_node(u) * v - u * diff_node(v)) / Expr::power(v, 2.0);
    }
    case Op::pow: {
        Expr u = e.lhs();
        if (!has_variable(u)) return zero;
        double k = e.value();
        if (k == 0.0) return zero;
        return Expr::constant(k) * Expr::power(u, k - 1.0) * diff_node(u);
    }
    case Op::exp: return e * diff_node(e.lhs());
    case Op::ln: return diff_node(e.lhs()) / e.lhs();
    case Op::sin: return Expr::unary(Op::cos, e.lhs()) * diff_node(e.lhs());
    case Op::cos: return -Expr::unary(Op::sin, e.lhs()) * diff_node(e.lhs());
    case Op::abs: break;
    }
    throw error(errc::not_differentiable, "abs is not differentiable everywhere");
}

} // namespace detail

/// Exact symbolic derivative with respect to t. Rejects any tree that
/// contains abs.
inline Expr diff(const Expr& e)
{
    if (detail::has_abs(e)) throw error(errc::not_differentiable, "expression contains abs: " + to_string(e));
    return simplify(detail::diff_node(e));
}

/// outer(inner(t)): every occurrence of t in `outer` is replaced by `inner`.
inline Expr compose(const Expr& outer, const Expr& inner)
{
    switch (outer.op()) {
    case Op::constant: return outer;
    case Op::variable: return inner;
    case Op::pow: return Expr::power(compose(outer.lhs(), inner), outer.value());
    default: break;
    }
    if (is_binary(outer.op()))
        return Expr::binary(outer.op(), compose(outer.lhs(), inner), compose(outer.rhs(), inner));
    return Expr::unary(outer.op(), compose(outer.lhs(), inner));
}

} // namespace tsfrac

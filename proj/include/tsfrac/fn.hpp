#pragma once

#include <cmath>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "tsfrac/expr.hpp"
#include "tsfrac/timescale.hpp"

namespace tsfrac {

/// A scalar function on a time scale: either an expression, or a table of
/// values keyed by scale points. Tables carry no derivative information.
class Fn {
public:
    using Table = std::map<double, double>;

    Fn(Expr e) : repr_(std::move(e)) {}
    explicit Fn(Table table) : repr_(std::move(table)) {}

    static Fn parse(std::string_view text) { return Fn(parse_expr(text)); }

    bool is_expr() const { return std::holds_alternative<Expr>(repr_); }

    /// Throws NotDifferentiable for tabulated functions.
    const Expr& expr() const
    {
        if (auto* e = std::get_if<Expr>(&repr_)) return *e;
        throw error(errc::not_differentiable, "tabulated function has no symbolic form");
    }

    double operator()(double t) const
    {
        if (auto* e = std::get_if<Expr>(&repr_)) return eval(*e, t);
        const auto& table = std::get<Table>(repr_);
        auto it = table.lower_bound(t - membership_tolerance);
        if (it == table.end() || std::abs(it->first - t) > membership_tolerance)
            throw error(errc::domain_error, "tabulated function undefined at t = " + detail::format_number(t));
        return it->second;
    }

    /// Precondition: !is_expr().
    const Table& table() const { return std::get<Table>(repr_); }

    std::string text() const
    {
        if (auto* e = std::get_if<Expr>(&repr_)) return to_string(*e);
        return "<table:" + std::to_string(std::get<Table>(repr_).size()) + " points>";
    }

private:
    std::variant<Expr, Table> repr_;
};

/// outer ∘ inner. Expression-backed inputs compose symbolically; a
/// tabulated inner function yields a table over the same points.
inline Fn compose(const Fn& outer, const Fn& inner)
{
    if (inner.is_expr()) return Fn(compose(outer.expr(), inner.expr()));
    Fn::Table table;
    for (const auto& [t, v] : inner.table()) table.emplace(t, outer(v));
    return Fn(std::move(table));
}

} // namespace tsfrac

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "tsfrac/fn.hpp"

using namespace tsfrac;

namespace {

errc code_of(auto&& fn)
{
    try {
        fn();
    } catch (const error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected a tsfrac::error";
    return errc::invalid_argument;
}

const Expr t = Expr::variable();

} // namespace

TEST(ExprParse, Power) { EXPECT_EQ(parse_expr("t^2"), Expr::power(t, 2)); }

TEST(ExprParse, ExpOfSquare) { EXPECT_EQ(parse_expr("exp(t^2)"), Expr::unary(Op::exp, Expr::power(t, 2))); }

TEST(ExprParse, PowerBindsTighterThanUnaryMinus)
{
    EXPECT_EQ(parse_expr("-t^2"), -Expr::power(t, 2));
    EXPECT_EQ(eval(parse_expr("-t^2"), 3), -9.0);
    EXPECT_EQ(eval(parse_expr("(-t)^2"), 3), 9.0);
}

TEST(ExprParse, Precedence)
{
    EXPECT_EQ(eval(parse_expr("1 + 2*t - t/4"), 4), 8.0);
    EXPECT_EQ(eval(parse_expr("2*t+1"), 3), 7.0);
    EXPECT_EQ(eval(parse_expr("8/2/2"), 0), 2.0);
    EXPECT_EQ(eval(parse_expr("10-3-2"), 0), 5.0);
    EXPECT_EQ(eval(parse_expr("2*-t"), 3), -6.0);
}

TEST(ExprParse, ConstantExponentsFold)
{
    EXPECT_EQ(eval(parse_expr("t^(1/2)"), 4), 2.0);
    EXPECT_EQ(eval(parse_expr("t^-1"), 4), 0.25);
    EXPECT_EQ(eval(parse_expr("t^2^3"), 2), 256.0);
}

TEST(ExprParse, NonConstantExponentRejected)
{
    EXPECT_EQ(code_of([] { parse_expr("t^t"); }), errc::syntax_error);
}

TEST(ExprParse, Errors)
{
    EXPECT_EQ(code_of([] { parse_expr(""); }), errc::syntax_error);
    EXPECT_EQ(code_of([] { parse_expr("t +"); }), errc::syntax_error);
    EXPECT_EQ(code_of([] { parse_expr("(t"); }), errc::syntax_error);
    EXPECT_EQ(code_of([] { parse_expr("t t"); }), errc::syntax_error);
    EXPECT_EQ(code_of([] { parse_expr("x + 1"); }), errc::unknown_identifier);
    EXPECT_EQ(code_of([] { parse_expr("tan(t)"); }), errc::unknown_identifier);
}

TEST(ExprParse, ErrorOffset)
{
    try {
        parse_expr("1 + * t");
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::syntax_error);
        EXPECT_EQ(e.offset(), 4u);
    }
}

TEST(ExprEval, Examples)
{
    EXPECT_EQ(eval(parse_expr("t^2"), 3), 9.0);
    EXPECT_EQ(eval(parse_expr("exp(t)"), 0), 1.0);
    EXPECT_DOUBLE_EQ(eval(parse_expr("t^0.5"), 2), std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(eval(parse_expr("sin(t)^2 + cos(t)^2"), 0.7), 1.0);
    EXPECT_EQ(eval(parse_expr("abs(t - 5)"), 2), 3.0);
    EXPECT_DOUBLE_EQ(eval(parse_expr("ln(exp(t))"), 1.25), 1.25);
}

TEST(ExprEval, DomainErrors)
{
    EXPECT_EQ(code_of([] { eval(parse_expr("1/(t-1)"), 1); }), errc::domain_error);
    EXPECT_EQ(code_of([] { eval(parse_expr("ln(t)"), 0); }), errc::domain_error);
    EXPECT_EQ(code_of([] { eval(parse_expr("ln(t)"), -1); }), errc::domain_error);
    EXPECT_EQ(code_of([] { eval(parse_expr("t^0.5"), -4); }), errc::domain_error);
    EXPECT_EQ(code_of([] { eval(parse_expr("t^-1"), 0); }), errc::domain_error);
    EXPECT_EQ(code_of([] { eval(parse_expr("exp(t)"), 1000); }), errc::domain_error);
    EXPECT_EQ(eval(parse_expr("t^3"), -2), -8.0);
}

TEST(ExprDiff, Examples)
{
    EXPECT_EQ(simplify(diff(parse_expr("exp(t)"))), parse_expr("exp(t)"));
    EXPECT_EQ(simplify(diff(parse_expr("t^2"))), simplify(Expr::constant(2) * t));
    EXPECT_NEAR(eval(diff(parse_expr("exp(t^2)")), 1), 2 * std::exp(1.0), 1e-14);
}

TEST(ExprDiff, AbsIsNotDifferentiable)
{
    EXPECT_EQ(code_of([] { diff(parse_expr("abs(t)")); }), errc::not_differentiable);
    EXPECT_EQ(code_of([] { diff(parse_expr("1 + exp(abs(t))")); }), errc::not_differentiable);
}

TEST(ExprSimplify, Identities)
{
    EXPECT_EQ(simplify(parse_expr("t*1 + 0")), t);
    EXPECT_EQ(simplify(parse_expr("1*t^1")), t);
    EXPECT_EQ(simplify(parse_expr("--t")), t);
    EXPECT_EQ(simplify(parse_expr("2*3 + 4")), Expr::constant(10));
    EXPECT_EQ(simplify(parse_expr("t - 0")), t);
}

TEST(ExprCompose, SubstitutesVariable)
{
    const auto c = compose(parse_expr("exp(t)"), parse_expr("t^2"));
    EXPECT_EQ(c, parse_expr("exp(t^2)"));
    EXPECT_DOUBLE_EQ(eval(c, 1.5), std::exp(2.25));
}

TEST(FnTable, LookupAndErrors)
{
    Fn f(Fn::Table{{1.0, 10.0}, {2.0, 20.0}});
    EXPECT_FALSE(f.is_expr());
    EXPECT_EQ(f(2.0), 20.0);
    EXPECT_EQ(f(1.0 + 1e-14), 10.0);
    EXPECT_EQ(code_of([&] { f(1.5); }), errc::domain_error);
    EXPECT_EQ(code_of([&] { f.expr(); }), errc::not_differentiable);
}

TEST(FnTable, ComposeTabulatesOuterOverInnerValues)
{
    Fn inner(Fn::Table{{1.0, 2.0}, {2.0, 3.0}});
    Fn c = compose(Fn::parse("t^2"), inner);
    EXPECT_EQ(c(1.0), 4.0);
    EXPECT_EQ(c(2.0), 9.0);
}

// Randomly generated smooth expressions over a bounded grammar.
namespace {

Expr random_smooth(std::mt19937_64& rng, int depth)
{
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 8 : 1);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    switch (pick(rng)) {
    case 0: return Expr::constant(std::round(coef(rng) * 4) / 4);
    case 1: return t;
    case 2: return random_smooth(rng, depth - 1) + random_smooth(rng, depth - 1);
    case 3: return random_smooth(rng, depth - 1) - random_smooth(rng, depth - 1);
    case 4: return random_smooth(rng, depth - 1) * random_smooth(rng, depth - 1);
    case 5: return Expr::unary(Op::sin, random_smooth(rng, depth - 1));
    case 6: return Expr::unary(Op::cos, random_smooth(rng, depth - 1));
    case 7: return Expr::power(random_smooth(rng, depth - 1), std::uniform_int_distribution<int>(2, 3)(rng));
    default: return Expr::unary(Op::exp, Expr::constant(0.25) * random_smooth(rng, depth - 1));
    }
}

} // namespace

TEST(ExprProperties, PrintParseRoundTrip)
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
        const Expr e = random_smooth(rng, 4);
        const Expr back = parse_expr(to_string(e));
        EXPECT_EQ(simplify(back), simplify(e)) << to_string(e);
    }
}

TEST(ExprProperties, DerivativeMatchesCentralDifference)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> point(-1.5, 1.5);
    const double h = 1e-5;
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
        const Expr e = random_smooth(rng, 3);
        const Expr d = diff(e);
        const double x = point(rng);
        try {
            const double exact = eval(d, x);
            const double fd = (eval(e, x + h) - eval(e, x - h)) / (2 * h);
            // Central differences carry rounding error ~ eps |e| / h.
            const double noise = 1e-10 * (1.0 + std::abs(eval(e, x)));
            EXPECT_LE(std::abs(exact - fd), 1e-6 * (1.0 + std::abs(exact)) + noise) << to_string(e) << " at " << x;
            ++checked;
        } catch (const error&) {
        }
    }
    EXPECT_GT(checked, 250);
}

TEST(ExprProperties, DiffIsLinear)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> point(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const Expr e1 = random_smooth(rng, 3);
        const Expr e2 = random_smooth(rng, 3);
        const double a = std::round(point(rng) * 8) / 4;
        const Expr lhs = diff(Expr::constant(a) * e1 + e2);
        const Expr rhs = Expr::constant(a) * diff(e1) + diff(e2);
        for (int k = 0; k < 100; ++k) {
            const double x = point(rng);
            const double l = eval(lhs, x), r = eval(rhs, x);
            EXPECT_NEAR(l, r, 1e-12 * (1.0 + std::abs(r)));
        }
    }
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "tsfrac/calculus.hpp"

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

Fn fn(const char* text) { return Fn::parse(text); }

// Independent summation over the points of a purely discrete scale.
double plain_sum(const std::vector<double>& pts, double (*f)(double), double alpha)
{
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        s += f(pts[i]) * std::pow(pts[i], alpha - 1.0) * (pts[i + 1] - pts[i]);
    return s;
}

} // namespace

TEST(DeltaDerivative, Examples)
{
    EXPECT_EQ(delta_derivative(fn("t^2"), TimeScale::parse("Z:-10..10"), 3), 7.0);
    EXPECT_EQ(delta_derivative(fn("t^2"), TimeScale::parse("R:0..1"), 0.5), 1.0);
    EXPECT_EQ(delta_derivative(fn("t^2"), TimeScale::parse("h:0.5:0..5"), 2), 4.5);
}

TEST(DeltaDerivative, Errors)
{
    const auto Z = TimeScale::parse("Z:1..5");
    EXPECT_EQ(code_of([&] { delta_derivative(fn("t"), Z, 5); }), errc::point_not_in_scale);
    EXPECT_EQ(code_of([&] { delta_derivative(fn("t"), Z, 2.5); }), errc::point_not_in_scale);
    Fn table(Fn::Table{{0.0, 0.0}, {1.0, 1.0}});
    EXPECT_EQ(code_of([&] { delta_derivative(table, TimeScale::parse("R:0..1"), 0.5); }), errc::not_differentiable);
}

TEST(DeltaDerivative, RightDenseMaximumUsesOneSidedLimit)
{
    const auto r = frac_derivative(fn("t^2"), TimeScale::parse("R:0..1"), 1.0, 1.0);
    EXPECT_NEAR(r.value, 2.0, 1e-12);
    EXPECT_TRUE(r.point_class.is_max);
}

TEST(FracDerivative, SquareOnIntegers)
{
    const auto r = frac_derivative(fn("t^2"), TimeScale::parse("Z:1..10"), 4, 0.5);
    EXPECT_DOUBLE_EQ(r.value, 18.0);
    EXPECT_EQ(r.method, DerivMethod::scattered_quotient);
    EXPECT_EQ(r.point_class.right, Side::scattered);
}

TEST(FracDerivative, ConstantHasZeroDerivative)
{
    for (const char* scale : {"Z:1..5", "R:1..2", "q:2:0..3", "union(R:1..2;set:{3,4.5})"}) {
        const auto T = TimeScale::parse(scale);
        for (double alpha : {0.3, 1.0}) {
            EXPECT_EQ(frac_derivative(fn("7"), T, T.min(), alpha).value, 0.0) << scale;
        }
    }
}

TEST(FracDerivative, DensePoint)
{
    const auto r = frac_derivative(fn("t"), TimeScale::parse("R:1..2"), 1.44, 0.5);
    EXPECT_NEAR(r.value, 1.2, 1e-15);
    EXPECT_EQ(r.method, DerivMethod::symbolic_dense);
}

TEST(FracDerivative, FiniteDifferencePath)
{
    DerivOptions opts;
    opts.dense = DenseRule::finite_difference;
    const auto r = frac_derivative(fn("exp(t)"), TimeScale::parse("R:1..2"), 1.5, 0.5, opts);
    EXPECT_EQ(r.method, DerivMethod::finite_difference_dense);
    EXPECT_NEAR(r.value, std::exp(1.5) * std::sqrt(1.5), 1e-6 * std::exp(1.5));
    const auto edge = frac_derivative(fn("exp(t)"), TimeScale::parse("R:1..2"), 2.0, 1.0, opts);
    EXPECT_NEAR(edge.value, std::exp(2.0), 1e-6 * std::exp(2.0));
}

TEST(FracDerivative, NegativePointRejectedForFractionalAlpha)
{
    const auto Z = TimeScale::parse("Z:-3..3");
    EXPECT_EQ(code_of([&] { frac_derivative(fn("t"), Z, -2, 0.5); }), errc::negative_point_with_fractional_alpha);
    EXPECT_EQ(frac_derivative(fn("t^2"), Z, -2, 1.0).value, -3.0);
}

TEST(FracDerivative, AlphaOutOfRange)
{
    const auto Z = TimeScale::parse("Z:1..3");
    EXPECT_EQ(code_of([&] { frac_derivative(fn("t"), Z, 1, 0.0); }), errc::invalid_argument);
    EXPECT_EQ(code_of([&] { frac_derivative(fn("t"), Z, 1, 1.5); }), errc::invalid_argument);
}

TEST(FracDerivative, LimitAtZero)
{
    // On [0,1], T_α(t^2)(t) = 2 t^{2-α} -> 0.
    const auto dense = frac_derivative(fn("t^2"), TimeScale::parse("R:0..1"), 0, 0.5);
    EXPECT_EQ(dense.method, DerivMethod::limit_at_zero);
    EXPECT_NEAR(dense.value, 0.0, 1e-6);
    // T_α(t)(t) = t^{1-α} has no finite rate of convergence check at 1e-6 on Z.
    EXPECT_EQ(code_of([] { frac_derivative(Fn::parse("t"), TimeScale::parse("Z:0..5"), 0, 0.5); }),
              errc::zero_limit_undetermined);
}

TEST(FracDerivativeOrderZero, IsIdentity)
{
    EXPECT_EQ(frac_derivative_order_zero(fn("t^2"), 3), 9.0);
    EXPECT_EQ(frac_derivative_order_zero(fn("exp(t)"), 0), 1.0);
    EXPECT_DOUBLE_EQ(frac_derivative_order_zero(fn("t^0.5"), 2), std::sqrt(2.0));
}

TEST(FracIntegral, Examples)
{
    const auto Z = TimeScale::parse("Z:1..10");
    const auto r = frac_integral(fn("1"), Z, 1, 4, 0.5);
    EXPECT_NEAR(r.value, 1 + std::pow(2.0, -0.5) + std::pow(3.0, -0.5), 1e-15);
    EXPECT_EQ(r.abs_error_estimate, 0.0);
    EXPECT_EQ(frac_integral(fn("t^3"), Z, 3, 3, 0.5).value, 0.0);
    EXPECT_NEAR(frac_integral(fn("1"), TimeScale::parse("R:1..2"), 1, 2, 1.0).value, 1.0, 1e-14);
}

TEST(FracIntegral, Orientation)
{
    const auto T = TimeScale::parse("union(R:1..2;set:{3,4})");
    const auto fwd = frac_integral(fn("exp(t/4)"), T, 1, 4, 0.7);
    const auto back = frac_integral(fn("exp(t/4)"), T, 4, 1, 0.7);
    EXPECT_EQ(back.value, -fwd.value);
    EXPECT_EQ(back.discrete_part, -fwd.discrete_part);
}

TEST(FracIntegral, SingularEndpointNearZero)
{
    // ∫_{1e-6}^{1} t^{α-1} dt = (1 - 1e-6^α)/α.
    const double alpha = 0.3, lo = 1e-6;
    const auto r = frac_integral(fn("1"), TimeScale::parse("R:0.000001..1"), lo, 1, alpha);
    EXPECT_NEAR(r.value, (1.0 - std::pow(lo, alpha)) / alpha, 1e-10);
    EXPECT_LE(r.abs_error_estimate, 1e-10);
}

TEST(FracIntegral, NonpositivePointsRejected)
{
    EXPECT_EQ(code_of([] { frac_integral(fn("1"), TimeScale::parse("R:0..1"), 0, 1, 0.5); }),
              errc::nonpositive_point_with_fractional_alpha);
    EXPECT_NEAR(frac_integral(fn("1"), TimeScale::parse("R:0..1"), 0, 1, 1.0).value, 1.0, 1e-14);
}

TEST(FracIntegral, DiscreteScaleMatchesPlainLoop)
{
    auto f = [](double x) { return std::exp(x / 4) + x * x; };
    for (const char* scale : {"Z:1..9", "q:2:-2..4", "set:{0.5,1.25,2,3.75,4.5}", "h:0.25:1..3"}) {
        const auto T = TimeScale::parse(scale);
        std::vector<double> pts;
        for (double x = T.min();; x = T.sigma(x)) {
            pts.push_back(x);
            if (x == T.max()) break;
        }
        for (double alpha : {0.2, 0.5, 1.0}) {
            const auto r = frac_integral(f, T, T.min(), T.max(), alpha);
            EXPECT_EQ(r.value, plain_sum(pts, [](double x) { return std::exp(x / 4) + x * x; }, alpha)) << scale;
            EXPECT_EQ(r.abs_error_estimate, 0.0);
        }
    }
}

TEST(SigmaFormula, Examples)
{
    EXPECT_EQ(verify_sigma_formula(fn("t^2"), TimeScale::parse("Z:1..10"), 3, 0.7), 0.0);
    EXPECT_EQ(verify_sigma_formula(fn("exp(t)"), TimeScale::parse("R:0..1"), 0.5, 0.4), 0.0);
    const auto q = TimeScale::parse("q:2:0..5");
    EXPECT_LE(std::abs(verify_sigma_formula(fn("exp(t)"), q, 2, 0.5)), 1e-9 * (1 + std::exp(4.0)));
}

TEST(EpsilonDelta, ScatteredPoint)
{
    const auto Z = TimeScale::parse("Z:1..10");
    EXPECT_TRUE(verify_epsilon_delta(fn("t^2"), Z, 4, 0.5, 18.0, 1e-8, 5));
    EXPECT_FALSE(verify_epsilon_delta(fn("t^2"), Z, 4, 0.5, 17.0, 1e-8, 5));
}

TEST(EpsilonDelta, DensePoint)
{
    const auto T = TimeScale::parse("R:1..2");
    const double t = 1.5, alpha = 0.5;
    const double exact = 2 * t * std::pow(t, 1 - alpha);
    EXPECT_TRUE(verify_epsilon_delta(fn("t^2"), T, t, alpha, exact, 1e-4, 12));
    EXPECT_FALSE(verify_epsilon_delta(fn("t^2"), T, t, alpha, exact + 0.1, 1e-4, 12));
}

TEST(EpsilonDelta, RequiresSamples)
{
    EXPECT_EQ(code_of([] { verify_epsilon_delta(fn("t"), TimeScale::parse("Z:1..3"), 1, 1, 1, 1e-8, 0); }),
              errc::invalid_argument);
}

// Randomized properties of the integral on mixed scales.
namespace {

struct Instance {
    TimeScale T;
    double a, c, b;
    double alpha;
};

const std::vector<std::string> mixed_scales{
    "union(R:0.5..1.5;Z:2..5;R:6..7;set:{8.5})", "union(set:{0.25,0.5};R:1..3)", "Z:1..12", "q:2:-3..3",
    "h:0.5:1..6",                                "R:0.1..2",
};
const std::vector<std::string> pool{"t", "t^2", "exp(t/4)", "2*t+1", "sin(t)", "cos(3*t)", "1/(1+t^2)"};

Instance draw(std::mt19937_64& rng)
{
    auto T = TimeScale::parse(mixed_scales[rng() % mixed_scales.size()]);
    std::uniform_real_distribution<double> u(T.min(), T.max());
    double pts[3];
    for (double& p : pts) p = *T.ceil_point(u(rng));
    std::sort(std::begin(pts), std::end(pts));
    return {T, pts[0], pts[1], pts[2], 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng)};
}

} // namespace

TEST(FracIntegralProperties, LinearityAdditivityOrientation)
{
    std::mt19937_64 rng(21);
    for (int i = 0; i < 300; ++i) {
        const auto in = draw(rng);
        const Fn f = Fn::parse(pool[rng() % pool.size()]);
        const Fn g = Fn::parse(pool[rng() % pool.size()]);
        const double gamma = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
        auto I = [&](auto&& h, double a, double b) { return frac_integral(h, in.T, a, b, in.alpha).value; };

        const double If = I(f, in.a, in.b), Ig = I(g, in.a, in.b);
        EXPECT_NEAR(I([&](double x) { return f(x) + g(x); }, in.a, in.b), If + Ig, 1e-10);
        EXPECT_NEAR(I([&](double x) { return gamma * f(x); }, in.a, in.b), gamma * If, 1e-10 * (1 + std::abs(gamma)));
        EXPECT_EQ(I(f, in.b, in.a), -If);
        EXPECT_NEAR(I(f, in.a, in.c) + I(f, in.c, in.b), If, 1e-10);
    }
}

TEST(FracIntegralProperties, Monotonicity)
{
    std::mt19937_64 rng(33);
    for (int i = 0; i < 200; ++i) {
        const auto in = draw(rng);
        const Fn f = Fn::parse(pool[rng() % pool.size()]);
        const double r = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
        auto g = [&](double x) { return std::abs(f(x)) + std::abs(r); };
        const double lhs = std::abs(frac_integral(f, in.T, in.a, in.b, in.alpha).value);
        EXPECT_LE(lhs, frac_integral(g, in.T, in.a, in.b, in.alpha).value + 1e-10);
    }
}

TEST(FracDerivativeProperties, AlphaOneReduction)
{
    std::mt19937_64 rng(41);
    const auto Z = TimeScale::parse("Z:-20..20");
    const auto R = TimeScale::parse("R:-2..3");
    for (int i = 0; i < 100; ++i) {
        const Fn f = Fn::parse(pool[rng() % pool.size()]);
        const double t = static_cast<double>(static_cast<int>(rng() % 40) - 20);
        EXPECT_EQ(frac_derivative(f, Z, t, 1.0).value, f(t + 1) - f(t));
        const double x = std::uniform_real_distribution<double>(-1.9, 2.9)(rng);
        const double exact = eval(diff(f.expr()), x);
        EXPECT_NEAR(frac_derivative(f, R, x, 1.0).value, exact, 1e-8 * (1 + std::abs(exact)));
    }
}

TEST(FracDerivativeProperties, SigmaFormulaOnRandomDraws)
{
    std::mt19937_64 rng(55);
    for (int i = 0; i < 300; ++i) {
        const auto in = draw(rng);
        const Fn f = Fn::parse(pool[rng() % pool.size()]);
        const auto pc = in.T.classify(in.b);
        if (pc.is_max && pc.left == Side::scattered) continue;
        const double res = verify_sigma_formula(f, in.T, in.b, in.alpha);
        EXPECT_LE(std::abs(res), 1e-9 * (1 + std::abs(f(in.T.sigma(in.b)))));
    }
}

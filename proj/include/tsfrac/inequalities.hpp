#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsfrac/calculus.hpp"

namespace tsfrac {

enum class InequalityKind {
    holder,
    cauchy_schwarz,
    reversed_holder,
    minkowski,
    jensen_convex,
    jensen_concave,
    hermite_hadamard,
};

inline std::string_view to_string(InequalityKind k)
{
    switch (k) {
    case InequalityKind::holder: return "holder";
    case InequalityKind::cauchy_schwarz: return "cauchy_schwarz";
    case InequalityKind::reversed_holder: return "reversed_holder";
    case InequalityKind::minkowski: return "minkowski";
    case InequalityKind::jensen_convex: return "jensen_convex";
    case InequalityKind::jensen_concave: return "jensen_concave";
    case InequalityKind::hermite_hadamard: return "hermite_hadamard";
    }
    return "";
}

enum class Shape { convex, concave, automatic };

struct InequalityContext {
    std::string scale;
    double alpha = 1.0;
    std::optional<double> p;
    std::optional<double> q;
    std::vector<std::pair<std::string, std::string>> functions; ///< role -> expression text
    double a = 0.0;
    double b = 0.0;
};

struct HHContext {
    double x_w_alpha = 0.0;
    double weight_mass = 0.0;
};

/// Both sides of one inequality instance. `slack` is the margin in the
/// direction the inequality asserts (rhs - lhs for the upper-bound forms,
/// lhs - rhs for the reversed ones, the smaller of the two gaps for
/// Hermite–Hadamard), so `satisfied` means slack >= -tolerance.
struct InequalityReport {
    InequalityKind kind = InequalityKind::holder;
    double lhs = 0.0;
    double rhs = 0.0;
    double lower = 0.0; ///< Hermite–Hadamard only
    double mid = 0.0;   ///< Hermite–Hadamard and Jensen
    double upper = 0.0; ///< Hermite–Hadamard only
    double slack = 0.0;
    double tolerance = 0.0;
    bool satisfied = false;
    InequalityContext context;
    std::optional<HHContext> hh;
    /// Every alpha-integral evaluated for the report, by name.
    std::vector<std::pair<std::string, FracIntegralResult>> integrals;
};

/// Base slack tolerance, relative to 1 + |lhs| + |rhs|.
inline constexpr double slack_tolerance = 1e-12;
/// Minimum weight mass for Jensen and Hermite–Hadamard.
inline constexpr double min_weight_mass = 1e-12;
/// Lower bound on |f| for the reversed Hölder inequality.
inline constexpr double min_abs_value = 1e-12;

namespace detail {

class ReportBuilder {
public:
    ReportBuilder(InequalityKind kind, const TimeScale& T, double a, double b, double alpha)
        : T_(T), a_(T.snap(a)), b_(T.snap(b)), alpha_(alpha)
    {
        require_alpha(alpha);
        if (a_ > b_) throw error(errc::empty_range, "inequalities need a <= b");
        report_.kind = kind;
        report_.context.scale = T.to_string();
        report_.context.alpha = alpha;
        report_.context.a = a_;
        report_.context.b = b_;
    }

    template <class F>
    FracIntegralResult integral(std::string name, F&& f)
    {
        auto r = frac_integral(std::forward<F>(f), T_, a_, b_, alpha_);
        report_.integrals.emplace_back(std::move(name), r);
        return r;
    }

    void function(std::string role, const Fn& fn) { report_.context.functions.emplace_back(std::move(role), fn.text()); }

    void exponents(double p, double q)
    {
        report_.context.p = p;
        report_.context.q = q;
    }

    InequalityReport finish(double lhs, double rhs, double slack, double propagated_error)
    {
        report_.lhs = lhs;
        report_.rhs = rhs;
        report_.slack = slack;
        report_.tolerance = slack_tolerance * (1.0 + std::abs(lhs) + std::abs(rhs)) + propagated_error;
        report_.satisfied = slack >= -report_.tolerance;
        return std::move(report_);
    }

    InequalityReport& report() { return report_; }
    double a() const { return a_; }
    double b() const { return b_; }

private:
    const TimeScale& T_;
    double a_;
    double b_;
    double alpha_;
    InequalityReport report_;
};

// Points where the integrands are probed for preconditions: the scattered
// points of [a, b), b itself, and 65 evenly spaced points per continuous piece.
inline std::vector<double> grid_sample(const TimeScale& T, double a, double b)
{
    std::vector<double> pts;
    if (a == b) return pts;
    auto parts = T.iterate_scattered(a, b);
    for (const auto& sp : parts.scattered) pts.push_back(sp.point);
    for (const auto& iv : parts.continuous)
        for (int i = 0; i <= 64; ++i) pts.push_back(iv.lo + (iv.hi - iv.lo) * i / 64.0);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    return pts;
}

// Error of X^{1/p} given the error of X.
inline double root_error(double x, double ex, double p)
{
    if (x == 0.0 || ex == 0.0) return 0.0;
    return std::abs(std::pow(x, 1.0 / p) / (p * x)) * ex;
}

// Sign pattern of second differences of f on 128 points of [lo, hi].
inline Shape detect_shape(const Fn& f, double lo, double hi)
{
    if (!(hi > lo)) return Shape::convex;
    constexpr int n = 128;
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
        x[i] = lo + (hi - lo) * i / (n - 1);
        y[i] = f(x[i]);
    }
    bool pos = false, neg = false;
    for (int i = 1; i + 1 < n; ++i) {
        const double d2 = y[i - 1] - 2.0 * y[i] + y[i + 1];
        const double tol = 1e-9 * (1.0 + std::abs(y[i]));
        if (d2 > tol) pos = true;
        if (d2 < -tol) neg = true;
    }
    if (pos && neg) throw error(errc::shape_indeterminate, "second differences change sign on the sampled range");
    return neg ? Shape::concave : Shape::convex;
}

inline double slope_at(const Fn& f, double x)
{
    if (!f.is_expr()) return 0.0;
    try {
        return std::abs(eval(diff(f.expr()), x));
    } catch (const error&) {
        return 0.0;
    }
}

} // namespace detail

/// ∫|fg||h| Δ^α <= (∫|f|^p|h| Δ^α)^{1/p} (∫|g|^q|h| Δ^α)^{1/q},  1/p + 1/q = 1, p > 1.
inline InequalityReport holder(const Fn& f, const Fn& g, const Fn& h, const TimeScale& T, double a, double b,
                               double alpha, double p)
{
    if (!(p > 1.0)) throw error(errc::invalid_exponent, "Hölder needs p > 1, got " + detail::format_number(p));
    const double q = p / (p - 1.0);
    detail::ReportBuilder rb(InequalityKind::holder, T, a, b, alpha);
    rb.function("f", f);
    rb.function("g", g);
    rb.function("h", h);
    rb.exponents(p, q);
    auto lhs = rb.integral("|fg||h|", [&](double t) { return std::abs(f(t) * g(t)) * std::abs(h(t)); });
    auto A = rb.integral("|f|^p|h|", [&](double t) { return std::pow(std::abs(f(t)), p) * std::abs(h(t)); });
    auto B = rb.integral("|g|^q|h|", [&](double t) { return std::pow(std::abs(g(t)), q) * std::abs(h(t)); });
    const double rhs = std::pow(A.value, 1.0 / p) * std::pow(B.value, 1.0 / q);
    const double err = lhs.abs_error_estimate +
                       detail::root_error(A.value, A.abs_error_estimate, p) * std::pow(B.value, 1.0 / q) +
                       detail::root_error(B.value, B.abs_error_estimate, q) * std::pow(A.value, 1.0 / p);
    return rb.finish(lhs.value, rhs, rhs - lhs.value, err);
}

/// Hölder with p = q = 2, right side in square-root form.
inline InequalityReport cauchy_schwarz(const Fn& f, const Fn& g, const Fn& h, const TimeScale& T, double a, double b,
                                       double alpha)
{
    detail::ReportBuilder rb(InequalityKind::cauchy_schwarz, T, a, b, alpha);
    rb.function("f", f);
    rb.function("g", g);
    rb.function("h", h);
    rb.exponents(2.0, 2.0);
    auto lhs = rb.integral("|fg||h|", [&](double t) { return std::abs(f(t) * g(t)) * std::abs(h(t)); });
    auto A = rb.integral("|f|^2|h|", [&](double t) { return std::pow(std::abs(f(t)), 2.0) * std::abs(h(t)); });
    auto B = rb.integral("|g|^2|h|", [&](double t) { return std::pow(std::abs(g(t)), 2.0) * std::abs(h(t)); });
    const double rhs = std::sqrt(A.value * B.value);
    const double err = lhs.abs_error_estimate + detail::root_error(A.value * B.value,
                                                                   A.abs_error_estimate * B.value +
                                                                       B.abs_error_estimate * A.value,
                                                                   2.0);
    return rb.finish(lhs.value, rhs, rhs - lhs.value, err);
}

/// Reversed Hölder for p < 0 (so 0 < q < 1): the left side is bounded below.
/// The q < 0 case is obtained by swapping the roles of f and g.
inline InequalityReport reversed_holder(const Fn& f, const Fn& g, const Fn& h, const TimeScale& T, double a, double b,
                                        double alpha, double p)
{
    if (!(p < 0.0))
        throw error(errc::invalid_exponent, "reversed Hölder needs p < 0, got " + detail::format_number(p));
    const double q = p / (p - 1.0);
    detail::ReportBuilder rb(InequalityKind::reversed_holder, T, a, b, alpha);
    for (double t : detail::grid_sample(T, rb.a(), rb.b()))
        if (std::abs(f(t)) < min_abs_value)
            throw error(errc::function_vanishes, "|f| < 1e-12 at t = " + detail::format_number(t));
    rb.function("f", f);
    rb.function("g", g);
    rb.function("h", h);
    rb.exponents(p, q);
    auto lhs = rb.integral("|fg||h|", [&](double t) { return std::abs(f(t) * g(t)) * std::abs(h(t)); });
    auto A = rb.integral("|f|^p|h|", [&](double t) { return std::pow(std::abs(f(t)), p) * std::abs(h(t)); });
    auto B = rb.integral("|g|^q|h|", [&](double t) { return std::pow(std::abs(g(t)), q) * std::abs(h(t)); });
    const double rhs = std::pow(A.value, 1.0 / p) * std::pow(B.value, 1.0 / q);
    const double err = lhs.abs_error_estimate +
                       detail::root_error(A.value, A.abs_error_estimate, p) * std::pow(B.value, 1.0 / q) +
                       detail::root_error(B.value, B.abs_error_estimate, q) * std::pow(A.value, 1.0 / p);
    return rb.finish(lhs.value, rhs, lhs.value - rhs, err);
}

/// (∫|f+g|^p|h| Δ^α)^{1/p} <= (∫|f|^p|h| Δ^α)^{1/p} + (∫|g|^p|h| Δ^α)^{1/p},  p > 1.
inline InequalityReport minkowski(const Fn& f, const Fn& g, const Fn& h, const TimeScale& T, double a, double b,
                                  double alpha, double p)
{
    if (!(p > 1.0)) throw error(errc::invalid_exponent, "Minkowski needs p > 1, got " + detail::format_number(p));
    detail::ReportBuilder rb(InequalityKind::minkowski, T, a, b, alpha);
    rb.function("f", f);
    rb.function("g", g);
    rb.function("h", h);
    rb.exponents(p, p / (p - 1.0));
    auto S = rb.integral("|f+g|^p|h|", [&](double t) { return std::pow(std::abs(f(t) + g(t)), p) * std::abs(h(t)); });
    auto A = rb.integral("|f|^p|h|", [&](double t) { return std::pow(std::abs(f(t)), p) * std::abs(h(t)); });
    auto B = rb.integral("|g|^p|h|", [&](double t) { return std::pow(std::abs(g(t)), p) * std::abs(h(t)); });
    const double lhs = std::pow(S.value, 1.0 / p);
    const double rhs = std::pow(A.value, 1.0 / p) + std::pow(B.value, 1.0 / p);
    const double err = detail::root_error(S.value, S.abs_error_estimate, p) +
                       detail::root_error(A.value, A.abs_error_estimate, p) +
                       detail::root_error(B.value, B.abs_error_estimate, p);
    return rb.finish(lhs, rhs, rhs - lhs, err);
}

/// Jensen: with mean = ∫g|h| / ∫|h|, f(mean) <= ∫f(g)|h| / ∫|h| for convex f,
/// reversed for concave f. `lhs` = f(mean), `rhs` = `mid` = the weighted mean of f(g).
inline InequalityReport jensen(const Fn& f_outer, const Fn& g, const Fn& h, const TimeScale& T, double a, double b,
                               double alpha, Shape shape = Shape::automatic)
{
    if (!f_outer.is_expr()) throw error(errc::invalid_argument, "Jensen's outer function must be an expression");
    detail::ReportBuilder rb(InequalityKind::jensen_convex, T, a, b, alpha);
    rb.function("f", f_outer);
    rb.function("g", g);
    rb.function("h", h);
    auto M = rb.integral("|h|", [&](double t) { return std::abs(h(t)); });
    if (!(M.value > min_weight_mass))
        throw error(errc::zero_weight_mass, "∫|h| = " + detail::format_number(M.value));

    if (shape == Shape::automatic) {
        auto pts = detail::grid_sample(T, rb.a(), rb.b());
        double lo = g(pts.front()), hi = lo;
        for (double t : pts) {
            lo = std::min(lo, g(t));
            hi = std::max(hi, g(t));
        }
        shape = detail::detect_shape(f_outer, lo, hi);
    }
    rb.report().kind = shape == Shape::concave ? InequalityKind::jensen_concave : InequalityKind::jensen_convex;

    auto G = rb.integral("g|h|", [&](double t) { return g(t) * std::abs(h(t)); });
    auto F = rb.integral("f(g)|h|", [&](double t) { return f_outer(g(t)) * std::abs(h(t)); });
    const double mean = G.value / M.value;
    const double lhs = f_outer(mean);
    const double mid = F.value / M.value;
    const double err = (F.abs_error_estimate + std::abs(mid) * M.abs_error_estimate) / M.value +
                       detail::slope_at(f_outer, mean) *
                           (G.abs_error_estimate + std::abs(mean) * M.abs_error_estimate) / M.value;
    rb.report().mid = mid;
    const double slack = shape == Shape::concave ? lhs - mid : mid - lhs;
    return rb.finish(lhs, mid, slack, err);
}

/// Weighted Hermite–Hadamard: with x = ∫t w Δ^α / ∫w Δ^α,
///   f(x) <= ∫f w Δ^α / ∫w Δ^α <= ((b - x) f(a) + (x - a) f(b)) / (b - a)
/// for convex f; both inequalities reverse for concave f.
inline InequalityReport hermite_hadamard(const Fn& f, const Fn& w, const TimeScale& T, double a, double b,
                                         double alpha, Shape shape = Shape::automatic)
{
    if (!f.is_expr()) throw error(errc::invalid_argument, "Hermite–Hadamard needs an expression-backed f");
    detail::ReportBuilder rb(InequalityKind::hermite_hadamard, T, a, b, alpha);
    const double lo = rb.a(), hi = rb.b();
    if (!(lo < hi)) throw error(errc::empty_range, "Hermite–Hadamard needs a < b");
    for (double t : detail::grid_sample(T, lo, hi))
        if (w(t) < 0.0) throw error(errc::negative_weight, "w < 0 at t = " + detail::format_number(t));
    rb.function("f", f);
    rb.function("w", w);
    auto M = rb.integral("w", [&](double t) { return w(t); });
    if (!(M.value > min_weight_mass)) throw error(errc::zero_weight_mass, "∫w = " + detail::format_number(M.value));
    if (shape == Shape::automatic) shape = detail::detect_shape(f, lo, hi);

    auto X = rb.integral("t w", [&](double t) { return t * w(t); });
    auto F = rb.integral("f w", [&](double t) { return f(t) * w(t); });
    const double x = X.value / M.value;
    const double lower = f(x);
    const double mid = F.value / M.value;
    const double upper = ((hi - x) * f(lo) + (x - lo) * f(hi)) / (hi - lo);

    auto& r = rb.report();
    r.lower = lower;
    r.mid = mid;
    r.upper = upper;
    r.hh = HHContext{x, M.value};
    const double slack = shape == Shape::concave ? std::min(lower - mid, mid - upper)
                                                 : std::min(mid - lower, upper - mid);
    const double x_err = (X.abs_error_estimate + std::abs(x) * M.abs_error_estimate) / M.value;
    const double err = (F.abs_error_estimate + std::abs(mid) * M.abs_error_estimate) / M.value +
                       (detail::slope_at(f, x) + std::abs(f(hi) - f(lo)) / (hi - lo)) * x_err;
    return rb.finish(lower, upper, slack, err);
}

} // namespace tsfrac

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "tsfrac/fn.hpp"
#include "tsfrac/quadrature.hpp"
#include "tsfrac/timescale.hpp"

namespace tsfrac {

enum class DerivMethod { scattered_quotient, symbolic_dense, finite_difference_dense, limit_at_zero };

inline std::string_view to_string(DerivMethod m)
{
    switch (m) {
    case DerivMethod::scattered_quotient: return "scattered-quotient";
    case DerivMethod::symbolic_dense: return "symbolic-dense";
    case DerivMethod::finite_difference_dense: return "finite-difference-dense";
    case DerivMethod::limit_at_zero: return "limit-at-zero";
    }
    return "";
}

/// How the derivative is taken at right-dense points of expression-backed
/// functions.
enum class DenseRule { symbolic, finite_difference };

struct DerivOptions {
    DenseRule dense = DenseRule::symbolic;
};

struct FracDerivResult {
    double value = 0.0;
    double alpha = 1.0;
    PointClass point_class;
    DerivMethod method = DerivMethod::scattered_quotient;
};

struct FracIntegralResult {
    double value = 0.0;
    double discrete_part = 0.0;
    double continuous_part = 0.0;
    double abs_error_estimate = 0.0;
};

inline constexpr double integral_tolerance = 1e-10;

/// Step used by the dense finite-difference rule.
inline constexpr double fd_step = 1e-6;

namespace detail {

inline void require_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw error(errc::invalid_argument, "alpha must lie in (0, 1], got " + format_number(alpha));
}

// t^{1-alpha}; exactly 1 when alpha = 1.
inline double frac_weight(double t, double alpha) { return alpha == 1.0 ? 1.0 : std::pow(t, 1.0 - alpha); }

// t^{alpha-1}; exactly 1 when alpha = 1.
inline double integral_weight(double t, double alpha) { return alpha == 1.0 ? 1.0 : std::pow(t, alpha - 1.0); }

struct DeltaValue {
    double value;
    DerivMethod method;
};

inline double dense_finite_difference(const Fn& f, double t, const Interval& piece)
{
    const double room_left = t - piece.lo;
    const double room_right = piece.hi - t;
    const double h = std::min({fd_step, room_left, room_right});
    if (h >= 1e-9) return (f(t + h) - f(t - h)) / (2.0 * h);
    // One-sided second-order rules at (or extremely near) a segment end.
    if (room_right >= room_left) {
        const double s = std::min(fd_step, room_right / 2.0);
        return (-3.0 * f(t) + 4.0 * f(t + s) - f(t + 2.0 * s)) / (2.0 * s);
    }
    const double s = std::min(fd_step, room_left / 2.0);
    return (3.0 * f(t) - 4.0 * f(t - s) + f(t - 2.0 * s)) / (2.0 * s);
}

inline DeltaValue delta_derivative_impl(const Fn& f, const TimeScale& T, double t, const DerivOptions& opts)
{
    const double tt = T.snap(t);
    const double s = T.sigma(tt);
    if (s > tt) return {(f(s) - f(tt)) / (s - tt), DerivMethod::scattered_quotient};

    if (T.rho(tt) < tt && tt == T.max())
        throw error(errc::point_not_in_scale,
                    format_number(tt) + " is a left-scattered maximum, outside the differentiable part of the scale");
    if (tt == T.max() && tt == T.min())
        throw error(errc::point_not_in_scale, "single-point scale has no differentiable points");
    if (!f.is_expr())
        throw error(errc::not_differentiable, "tabulated function at right-dense point " + format_number(tt));

    auto piece = T.dense_interval(tt);
    if (opts.dense == DenseRule::finite_difference && piece)
        return {dense_finite_difference(f, tt, *piece), DerivMethod::finite_difference_dense};
    return {eval(diff(f.expr()), tt), DerivMethod::symbolic_dense};
}

} // namespace detail

/// Hilger delta derivative. Exact forward quotient at right-scattered points;
/// at right-dense points the symbolic derivative (or a finite difference when
/// requested through `opts`).
inline double delta_derivative(const Fn& f, const TimeScale& T, double t, const DerivOptions& opts = {})
{
    return detail::delta_derivative_impl(f, T, t, opts).value;
}

inline FracDerivResult frac_derivative(const Fn& f, const TimeScale& T, double t, double alpha,
                                       const DerivOptions& opts = {});

namespace detail {

// T_alpha(f)(0) as the limit along the three scale points nearest 0 from the
// right, by linear extrapolation of consecutive pairs. The two extrapolants
// must agree to 1e-6.
inline FracDerivResult limit_at_zero(const Fn& f, const TimeScale& T, double alpha, const DerivOptions& opts)
{
    std::array<double, 3> pts{};
    if (T.mu(0.0) > 0.0) {
        double p = 0.0;
        for (auto& slot : pts) {
            double next = T.sigma(p);
            if (next == p || T.sigma(next) == next)
                throw error(errc::zero_limit_undetermined, "fewer than three differentiable points to the right of 0");
            slot = p = next;
        }
    } else {
        auto piece = T.dense_interval(0.0);
        if (!piece || piece->hi <= 0.0)
            throw error(errc::zero_limit_undetermined, "0 is not approached from the right inside the scale");
        const double h0 = std::min(1e-4, piece->hi / 4.0);
        pts = {h0 / 4.0, h0 / 2.0, h0};
    }
    std::array<double, 3> v{};
    for (std::size_t i = 0; i < 3; ++i) v[i] = frac_derivative(f, T, pts[i], alpha, opts).value;
    const double l12 = v[0] - pts[0] * (v[1] - v[0]) / (pts[1] - pts[0]);
    const double l23 = v[1] - pts[1] * (v[2] - v[1]) / (pts[2] - pts[1]);
    if (!(std::abs(l12 - l23) <= 1e-6 * std::max(1.0, std::abs(l12))))
        throw error(errc::zero_limit_undetermined, "extrapolated values " + format_number(l12) + " and " +
                                                       format_number(l23) + " disagree");
    return {l12, alpha, T.classify(0.0), DerivMethod::limit_at_zero};
}

} // namespace detail

/// alpha-fractional derivative T_alpha(f)(t) = t^{1-alpha} f^Delta(t) for
/// t > 0; at t = 0 (alpha < 1) the limit from the right along the scale.
inline FracDerivResult frac_derivative(const Fn& f, const TimeScale& T, double t, double alpha,
                                       const DerivOptions& opts)
{
    detail::require_alpha(alpha);
    const double tt = T.snap(t);
    if (alpha < 1.0 && tt < 0.0)
        throw error(errc::negative_point_with_fractional_alpha,
                    "t = " + detail::format_number(tt) + " with alpha = " + detail::format_number(alpha));
    if (alpha < 1.0 && tt == 0.0) return detail::limit_at_zero(f, T, alpha, opts);

    auto delta = detail::delta_derivative_impl(f, T, tt, opts);
    FracDerivResult out;
    out.alpha = alpha;
    out.point_class = T.classify(tt);
    out.method = delta.method;
    out.value = alpha == 1.0 ? delta.value : detail::frac_weight(tt, alpha) * delta.value;
    return out;
}

/// T_0(f) is the identity operator.
inline double frac_derivative_order_zero(const Fn& f, double t) { return f(t); }

/// Cauchy alpha-fractional integral of f over [a, b): the delta integral of
/// f(t) t^{alpha-1}. Scattered points contribute f(t) t^{alpha-1} mu(t);
/// continuous pieces are integrated adaptively to 1e-10 absolute, with a
/// geometric mesh toward 0 when a piece starts within 1e-3 of it. Reversed
/// bounds flip the sign.
template <class F>
FracIntegralResult frac_integral(F&& f, const TimeScale& T, double a, double b, double alpha)
{
    detail::require_alpha(alpha);
    const double lo = T.snap(a);
    const double hi = T.snap(b);
    if (lo == hi) return {};
    if (lo > hi) {
        auto r = frac_integral(f, T, hi, lo, alpha);
        return {-r.value, -r.discrete_part, -r.continuous_part, r.abs_error_estimate};
    }
    if (alpha < 1.0 && lo <= 0.0)
        throw error(errc::nonpositive_point_with_fractional_alpha,
                    "range starts at " + detail::format_number(lo) + " with alpha = " + detail::format_number(alpha));

    const auto parts = T.iterate_scattered(lo, hi);
    FracIntegralResult out;
    for (const auto& sp : parts.scattered)
        out.discrete_part += f(sp.point) * detail::integral_weight(sp.point, alpha) * sp.weight;

    if (!parts.continuous.empty()) {
        QuadratureOptions opts;
        opts.abs_tol = integral_tolerance / static_cast<double>(parts.continuous.size());
        auto integrand = [&](double t) { return f(t) * detail::integral_weight(t, alpha); };
        for (const auto& piece : parts.continuous) {
            std::vector<double> mesh{piece.lo};
            if (alpha < 1.0 && piece.lo < 1e-3)
                for (double x = 2.0 * piece.lo; x < piece.hi; x *= 2.0) mesh.push_back(x);
            mesh.push_back(piece.hi);
            auto q = integrate(integrand, std::span<const double>(mesh), opts);
            if (!q.converged)
                throw error(errc::quadrature_failure, "tolerance not met on [" + detail::format_number(piece.lo) +
                                                          ", " + detail::format_number(piece.hi) + "]");
            out.continuous_part += q.value;
            out.abs_error_estimate += q.abs_error;
        }
    }
    out.value = out.discrete_part + out.continuous_part;
    return out;
}

/// f(sigma(t)) - f(t) - mu(t) t^{alpha-1} T_alpha(f)(t); zero up to rounding
/// whenever the derivative exists.
inline double verify_sigma_formula(const Fn& f, const TimeScale& T, double t, double alpha,
                                   const DerivOptions& opts = {})
{
    const auto d = frac_derivative(f, T, t, alpha, opts);
    const double tt = T.snap(t);
    const double s = T.sigma(tt);
    const double mu = s - tt;
    if (mu == 0.0) return f(s) - f(tt);
    if (alpha < 1.0 && tt <= 0.0)
        throw error(errc::nonpositive_point_with_fractional_alpha, "t^{alpha-1} is undefined at t = 0");
    return f(s) - f(tt) - mu * detail::integral_weight(tt, alpha) * d.value;
}

namespace detail {

// Scale points probing shrinking neighbourhoods of t. Ring k has radius
// r0 / 2^k with r0 = mu(t), or 1e-2 at right-dense points, and holds t plus
// the scale points nearest t -+ r/2 on the inner side.
inline std::vector<std::vector<double>> neighborhood_rings(const TimeScale& T, double t, std::size_t samples)
{
    const double tt = T.snap(t);
    const double mu = T.mu(tt);
    double radius = mu > 0.0 ? mu : 1e-2;
    std::vector<std::vector<double>> rings;
    for (std::size_t k = 0; k < samples; ++k, radius /= 2.0) {
        std::vector<double> ring{tt};
        if (auto left = T.ceil_point(tt - radius / 2.0); left && *left < tt) ring.push_back(*left);
        if (auto right = T.floor_point(tt + radius / 2.0); right && *right > tt) ring.push_back(*right);
        rings.push_back(std::move(ring));
    }
    return rings;
}

// A local condition "holds near t" when it holds on every point of the inner
// half of the rings (k >= samples / 2).
template <class Pred>
bool holds_on_inner_rings(const std::vector<std::vector<double>>& rings, Pred&& pred)
{
    for (std::size_t k = rings.size() / 2; k < rings.size(); ++k)
        for (double s : rings[k])
            if (!pred(s)) return false;
    return true;
}

} // namespace detail

/// Checks the defining inequality
///   |[f(sigma(t)) - f(s)] t^{1-alpha} - candidate (sigma(t) - s)| <= eps |sigma(t) - s|
/// on sampled scale points s in shrinking neighbourhoods of t.
inline bool verify_epsilon_delta(const Fn& f, const TimeScale& T, double t, double alpha, double candidate,
                                 double epsilon, std::size_t samples)
{
    detail::require_alpha(alpha);
    if (samples == 0) throw error(errc::invalid_argument, "samples must be at least 1");
    const double tt = T.snap(t);
    const double st = T.sigma(tt);
    const double weight = detail::frac_weight(tt, alpha);
    const double fst = f(st);
    auto rings = detail::neighborhood_rings(T, tt, samples);
    return detail::holds_on_inner_rings(rings, [&](double s) {
        const double lhs = std::abs((fst - f(s)) * weight - candidate * (st - s));
        return lhs <= epsilon * std::abs(st - s);
    });
}

} // namespace tsfrac

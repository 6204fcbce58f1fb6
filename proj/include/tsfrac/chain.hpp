#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "tsfrac/calculus.hpp"

namespace tsfrac {

struct ChainReport {
    double lhs = 0.0;             ///< T_alpha of the composition, computed directly
    double rhs = 0.0;             ///< chain-rule formula
    double abs_gap = 0.0;         ///< |lhs - rhs|
    bool hypothesis_ok = true;    ///< substitution hypothesis (second rule only)
    double quadrature_error = 0.0; ///< inner-integral error bound (first rule only)
};

/// Inner integral of the first chain rule: absolute tolerance and depth cap.
inline constexpr double chain_quadrature_tolerance = 1e-12;
inline constexpr int chain_quadrature_max_depth = 40;

/// Default number of neighbourhood rings for the substitution hypothesis.
inline constexpr std::size_t cr2_default_samples = 8;

namespace detail {

inline std::vector<double> discrete_points(const TimeScale& T)
{
    std::vector<double> pts;
    for (const auto& seg : T.segments()) {
        if (std::holds_alternative<ContinuousInterval>(seg)) continue;
        auto p = materialize(seg);
        pts.insert(pts.end(), p.begin(), p.end());
    }
    return pts;
}

// outer ∘ inner as an Fn usable on T: symbolic when both are expressions,
// otherwise tabulated on the discrete points of T.
inline Fn compose_on_scale(const Fn& outer, const Fn& inner, const TimeScale& T)
{
    if (outer.is_expr() && inner.is_expr()) return compose(outer, inner);
    Fn::Table table;
    for (double p : discrete_points(T)) table.emplace(p, outer(inner(p)));
    return Fn(std::move(table));
}

} // namespace detail

/// First chain rule: T_alpha(f∘g)(t) against
///   [∫_0^1 f'(g(t) + h mu(t) t^{alpha-1} T_alpha(g)(t)) dh] T_alpha(g)(t).
/// At right-dense t the bracket reduces to f'(g(t)).
inline ChainReport chain_rule_I(const Fn& f, const Fn& g, const TimeScale& T, double t, double alpha,
                                const DerivOptions& opts = {})
{
    if (!f.is_expr()) throw error(errc::not_differentiable, "outer function must be an expression");
    const Expr fprime = diff(f.expr());
    const double tt = T.snap(t);
    const auto tg = frac_derivative(g, T, tt, alpha, opts);
    const double mu = T.mu(tt);

    ChainReport out;
    if (mu == 0.0) {
        out.rhs = eval(fprime, g(tt)) * tg.value;
    } else {
        const double g0 = g(tt);
        const double jump = mu * detail::integral_weight(tt, alpha) * tg.value;
        QuadratureOptions q_opts;
        q_opts.abs_tol = chain_quadrature_tolerance;
        q_opts.max_depth = chain_quadrature_max_depth;
        auto q = integrate([&](double h) { return eval(fprime, g0 + h * jump); }, 0.0, 1.0, q_opts);
        out.rhs = q.value * tg.value;
        out.quadrature_error = q.abs_error * std::abs(tg.value);
    }
    out.lhs = frac_derivative(detail::compose_on_scale(f, g, T), T, tt, alpha, opts).value;
    out.abs_gap = std::abs(out.lhs - out.rhs);
    return out;
}

/// The scale nu(T) for strictly increasing nu. Discrete segments map to
/// finite sets point by point; continuous segments map to the interval
/// between the images of their endpoints.
inline TimeScale image_scale(const Fn& nu, const TimeScale& T)
{
    std::vector<double> probes;
    std::vector<Segment> mapped;
    for (const auto& seg : T.segments()) {
        if (const auto* iv = std::get_if<ContinuousInterval>(&seg)) {
            if (!nu.is_expr()) throw error(errc::invalid_argument, "continuous segments need an expression-backed map");
            for (int i = 0; i <= 65; ++i) probes.push_back(iv->lo + (iv->hi - iv->lo) * i / 65.0);
            probes.back() = iv->hi;
            mapped.emplace_back(ContinuousInterval{nu(iv->lo), nu(iv->hi)});
        } else {
            auto pts = detail::materialize(seg);
            FiniteSet image;
            for (double p : pts) image.values.push_back(nu(p));
            probes.insert(probes.end(), pts.begin(), pts.end());
            mapped.emplace_back(std::move(image));
        }
    }
    double prev = nu(probes.front());
    for (std::size_t i = 1; i < probes.size(); ++i) {
        if (probes[i] <= probes[i - 1]) continue;
        const double v = nu(probes[i]);
        if (!(v > prev))
            throw error(errc::not_monotone, "map is not strictly increasing near t = " + detail::format_number(probes[i]));
        prev = v;
    }
    try {
        return TimeScale(std::move(mapped));
    } catch (const error& e) {
        throw error(errc::image_not_representable, e.what());
    }
}

/// Samples the substitution hypothesis
///   |sigma~(nu(t)) - nu(s) - T_alpha(nu)(t) (sigma(t) - s)| <= eps |sigma(t) - s|
/// where sigma~ is the forward jump of nu(T).
inline bool check_cr2_hypothesis(const Fn& nu, const TimeScale& T, double t, double alpha, double epsilon,
                                 std::size_t samples = cr2_default_samples)
{
    const TimeScale image = image_scale(nu, T);
    const double tt = T.snap(t);
    const double st = T.sigma(tt);
    const double tnu = frac_derivative(nu, T, tt, alpha).value;
    const double sigma_image = image.sigma(nu(tt));
    auto rings = detail::neighborhood_rings(T, tt, samples);
    return detail::holds_on_inner_rings(rings, [&](double s) {
        return std::abs(sigma_image - nu(s) - tnu * (st - s)) <= epsilon * std::abs(st - s);
    });
}

/// Second chain rule: T_alpha(w∘nu)(t) against T~_alpha(w)(nu(t)) T_alpha(nu)(t),
/// with T~_alpha the fractional derivative on nu(T). No identity is implied
/// when `hypothesis_ok` is false.
inline ChainReport chain_rule_II(const Fn& w, const Fn& nu, const TimeScale& T, double t, double alpha, double epsilon,
                                 std::size_t samples = cr2_default_samples)
{
    const TimeScale image = image_scale(nu, T);
    const double tt = T.snap(t);
    ChainReport out;
    out.hypothesis_ok = check_cr2_hypothesis(nu, T, tt, alpha, epsilon, samples);
    const double tnu = frac_derivative(nu, T, tt, alpha).value;
    const double tw = frac_derivative(w, image, nu(tt), alpha).value;
    out.rhs = tw * tnu;
    out.lhs = frac_derivative(detail::compose_on_scale(w, nu, T), T, tt, alpha).value;
    out.abs_gap = std::abs(out.lhs - out.rhs);
    return out;
}

} // namespace tsfrac

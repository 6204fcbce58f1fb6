#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace tsfrac {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    std::size_t max_subdivisions = std::size_t{1} << 20;
    int max_depth = 60;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t subdivisions = 0;
    bool converged = true;
};

namespace detail {

struct KronrodEstimate {
    double value;
    double error;
    double resabs;
};

// 15-point Kronrod rule with its embedded 7-point Gauss rule; error
// heuristic as in QUADPACK's QK15.
template <class F>
KronrodEstimate gauss_kronrod15(F& f, double a, double b)
{
    static constexpr std::array<double, 8> xgk = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
    };
    static constexpr std::array<double, 8> wgk = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    };
    static constexpr std::array<double, 4> wg = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    };

    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resg = fc * wg[3];
    double resk = fc * wgk[7];
    double resabs = std::abs(resk);
    std::array<double, 7> fv1{}, fv2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += wgk[j] * (f1 + f2);
        resabs += wgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
    }
    const double mean = resk * 0.5;
    double resasc = wgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) resasc += wgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));

    const double scale = std::abs(half);
    resk *= half;
    resabs *= scale;
    resasc *= scale;
    double err = std::abs((resk - resg * half));
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {resk, err, resabs};
}

} // namespace detail

/// Globally adaptive Gauss–Kronrod quadrature over consecutive breakpoints.
/// The interval with the largest error estimate is bisected until the total
/// estimate meets `abs_tol`. Intervals whose error is at the rounding floor,
/// or that reached `max_depth`, are not split further; only the former
/// count as converged.
template <class F>
QuadratureResult integrate(F&& f, std::span<const double> breakpoints, const QuadratureOptions& opts = {})
{
    struct Cell {
        double a, b;
        detail::KronrodEstimate est;
        int depth;
    };
    auto by_error = [](const Cell& x, const Cell& y) { return x.est.error < y.est.error; };
    std::priority_queue<Cell, std::vector<Cell>, decltype(by_error)> open(by_error);
    std::vector<Cell> done;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    QuadratureResult out;
    if (breakpoints.size() < 2) return out;

    double total_error = 0.0;
    bool depth_limited = false;
    auto admit = [&](const Cell& cell) {
        total_error += cell.est.error;
        const double width = cell.b - cell.a;
        const bool at_floor = cell.est.error <= 100.0 * eps * cell.est.resabs;
        const bool too_narrow = width <= 4.0 * eps * std::max(std::abs(cell.a), std::abs(cell.b));
        if (at_floor || too_narrow) {
            done.push_back(cell);
        } else if (cell.depth >= opts.max_depth) {
            depth_limited = true;
            done.push_back(cell);
        } else {
            open.push(cell);
        }
    };

    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        double a = breakpoints[i], b = breakpoints[i + 1];
        if (!(b > a)) continue;
        admit(Cell{a, b, detail::gauss_kronrod15(f, a, b), 0});
    }

    while (!open.empty() && total_error > opts.abs_tol) {
        if (out.subdivisions >= opts.max_subdivisions) break;
        Cell cell = open.top();
        open.pop();
        total_error -= cell.est.error;
        const double mid = 0.5 * (cell.a + cell.b);
        admit(Cell{cell.a, mid, detail::gauss_kronrod15(f, cell.a, mid), cell.depth + 1});
        admit(Cell{mid, cell.b, detail::gauss_kronrod15(f, mid, cell.b), cell.depth + 1});
        ++out.subdivisions;
    }

    // Sum in ascending order of position for reproducibility.
    std::vector<Cell> all = std::move(done);
    while (!open.empty()) {
        all.push_back(open.top());
        open.pop();
    }
    std::sort(all.begin(), all.end(), [](const Cell& x, const Cell& y) { return x.a < y.a; });
    double value = 0.0, error = 0.0;
    bool unresolved = false;
    for (const auto& cell : all) {
        value += cell.est.value;
        error += cell.est.error;
        if (cell.est.error > 100.0 * eps * cell.est.resabs) unresolved = true;
    }
    out.value = value;
    out.abs_error = error;
    out.converged = error <= opts.abs_tol || !unresolved;
    if (depth_limited && error > opts.abs_tol) out.converged = false;
    return out;
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opts = {})
{
    const double pts[2] = {a, b};
    return integrate(std::forward<F>(f), std::span<const double>(pts, 2), opts);
}

} // namespace tsfrac

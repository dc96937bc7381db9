#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace mmdflow {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
};

/// Which one-sided limit a piecewise integrand should report at a point.
/// Interior points of a piece are continuity points, so either side works.
enum class Side { Right, Left };

namespace detail {

template <class F>
double simpson_refine(const F& f, double a, double b, double fa, double fm, double fb,
                      double whole, double tol, int depth, QuadratureResult& acc) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // Below this level the difference is rounding noise, not truncation error.
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(left) + std::abs(right));
    if (depth <= 0 || std::abs(delta) <= std::max(15.0 * tol, noise) || !(m > a && m < b)) {
        if (depth <= 0 && std::abs(delta) > 15.0 * tol) acc.converged = false;
        acc.error_estimate += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return simpson_refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, acc) +
           simpson_refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, acc);
}

} // namespace detail

/// Adaptive Simpson on [a, b] with caller-supplied endpoint values, so the
/// integrand may jump exactly at a or b. Only interior points are sampled.
template <class F>
QuadratureResult adaptive_simpson(const F& f, double a, double b, double fa, double fb,
                                  double abs_tol = 1e-10, int max_depth = 40) {
    QuadratureResult acc;
    if (!(b > a)) return acc;
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    acc.value = detail::simpson_refine(f, a, b, fa, fm, fb, whole, abs_tol, max_depth, acc);
    return acc;
}

template <class F>
QuadratureResult adaptive_simpson(const F& f, double a, double b, double abs_tol = 1e-10,
                                  int max_depth = 40) {
    return adaptive_simpson(f, a, b, f(a), f(b), abs_tol, max_depth);
}

/// Integrates a function that is smooth between the given breakpoints but
/// may jump at them. `f(x, side)` must return the one-sided limit at
/// breakpoints; each piece is pre-split into `panels` Simpson panels.
template <class F>
QuadratureResult integrate_piecewise(const F& f, double a, double b,
                                     std::span<const double> breakpoints,
                                     double abs_tol = 1e-10, int max_depth = 40,
                                     int panels = 8) {
    QuadratureResult total;
    if (!(b > a)) return total;
    std::vector<double> knots{a};
    for (double x : breakpoints)
        if (x > a && x < b) knots.push_back(x);
    knots.push_back(b);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    const std::size_t pieces = knots.size() - 1;
    const double per_panel_tol = abs_tol / static_cast<double>(pieces * static_cast<std::size_t>(panels));
    auto interior = [&f](double x) { return f(x, Side::Right); };
    for (std::size_t p = 0; p < pieces; ++p) {
        const double lo = knots[p];
        const double hi = knots[p + 1];
        const double width = (hi - lo) / panels;
        for (int k = 0; k < panels; ++k) {
            const double pa = lo + k * width;
            const double pb = (k + 1 == panels) ? hi : lo + (k + 1) * width;
            const double fa = (k == 0) ? f(pa, Side::Right) : interior(pa);
            const double fb = (k + 1 == panels) ? f(pb, Side::Left) : interior(pb);
            const auto r = adaptive_simpson(interior, pa, pb, fa, fb, per_panel_tol, max_depth);
            total.value += r.value;
            total.error_estimate += r.error_estimate;
            total.converged = total.converged && r.converged;
        }
    }
    return total;
}

} // namespace mmdflow

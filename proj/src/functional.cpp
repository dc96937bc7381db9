#include "mmdflow/functional.hpp"

#include "mmdflow/errors.hpp"
#include "mmdflow/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace mmdflow {

double functional_F(const QuantileGrid& g, const Target& t) {
    const Measure& nu = t.measure();
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double s = g.s(i);
        sum += (1.0 - 2.0 * s) * g[i] + nu.expected_abs_deviation(g[i]);
    }
    return sum / static_cast<double>(g.size());
}

double kernel_self_term(const Target& t) { return -t.half_mean_distance(); }

double mmd_squared(const Measure& mu, const Measure& nu) {
    const Interval rm = effective_range(mu);
    const Interval rn = effective_range(nu);
    const double lo = std::min(rm.lo, rn.lo);
    const double hi = std::max(rm.hi, rn.hi);
    std::vector<double> bps = mu.breakpoints();
    const auto more = nu.breakpoints();
    bps.insert(bps.end(), more.begin(), more.end());

    auto f = [&](double x, Side side) {
        const double d = side == Side::Right ? mu.cdf_right(x) - nu.cdf_right(x) : mu.cdf_left(x) - nu.cdf_left(x);
        return d * d;
    };
    const auto res = integrate_piecewise(f, lo, hi, bps, 1e-10, 40);
    if (!res.converged) throw NumericalError("mmd_squared: quadrature did not converge");
    return std::max(res.value, 0.0);
}

std::vector<double> subgradient(const QuantileGrid& g, const Target& t, SubgradientSelection sel) {
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double s2 = 2.0 * g.s(i);
        const double lo = 2.0 * t.cdf_left(g[i]) - s2;
        const double hi = 2.0 * t.cdf_right(g[i]) - s2;
        switch (sel) {
        case SubgradientSelection::Left: f[i] = lo; break;
        case SubgradientSelection::Right: f[i] = hi; break;
        case SubgradientSelection::Minimal: f[i] = std::clamp(0.0, lo, hi); break;
        }
    }
    return f;
}

std::vector<double> gradient_continuous(const QuantileGrid& g, const Target& t) {
    if (!t.is_continuous())
        throw AtomicTargetError("gradient_continuous: target " + t.measure().to_string() + " has atoms");
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = 2.0 * t.cdf_right(g[i]) - 2.0 * g.s(i);
    return f;
}

} // namespace mmdflow

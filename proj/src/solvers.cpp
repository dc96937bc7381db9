#include "mmdflow/solvers.hpp"

#include "mmdflow/errors.hpp"
#include "mmdflow/isotonic.hpp"
#include "mmdflow/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace mmdflow {

double resolvent_point(double y, const Target& t, double tau, double lo, double hi, double bisect_atol) {
    auto holds = [&](double x) { return x + 2.0 * tau * t.cdf_right(x) >= y; };
    if (holds(lo)) return lo;
    while (hi - lo > bisect_atol) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (holds(mid))
            hi = mid;
        else
            lo = mid;
    }
    // An atom inside the final bracket where the predicate already holds is
    // the exact answer.
    const auto& atoms = t.atom_locations();
    for (auto it = std::upper_bound(atoms.begin(), atoms.end(), lo); it != atoms.end() && *it <= hi; ++it)
        if (holds(*it)) return *it;
    return hi;
}

QuantileGrid implicit_euler_step(const QuantileGrid& g, const Target& t, double tau, double bisect_atol) {
    if (!(tau > 0.0)) throw DomainError("implicit_euler_step: tau must be positive");
    const std::size_t n = g.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = g[i] + 2.0 * tau * g.s(i);
    const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
    const double lo = *ymin - 2.0 * tau;
    const double hi = *ymax;

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = resolvent_point(y[i], t, tau, lo, hi, bisect_atol);
    return QuantileGrid(std::move(x));
}

StepResult explicit_euler_step(const QuantileGrid& g, const Target& t, double tau, MonotonicityPolicy policy) {
    if (!(tau > 0.0)) throw DomainError("explicit_euler_step: tau must be positive");
    if (!t.is_continuous())
        throw AtomicTargetError("explicit Euler needs a target without atoms, got " + t.measure().to_string());
    std::vector<double> x(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) x[i] = g[i] - tau * (2.0 * t.cdf_right(g[i]) - 2.0 * g.s(i));

    StepResult r{QuantileGrid(x), 0};
    r.violations = r.state.monotonicity_violations();
    if (r.violations == 0) return r;
    switch (policy) {
    case MonotonicityPolicy::Error:
        throw MonotonicityError("explicit Euler step broke monotonicity at " + std::to_string(r.violations) +
                                    " grid points",
                                r.violations);
    case MonotonicityPolicy::Project: r.state = QuantileGrid(isotonic_projection(x)); break;
    case MonotonicityPolicy::Warn: break;
    }
    return r;
}

namespace {

const std::vector<TargetAtom>& discrete_atoms(const Target& t) {
    if (!t.atoms()) throw NotDiscreteTarget("closed form needs a discrete target, got " + t.measure().to_string());
    return *t.atoms();
}

} // namespace

double closed_form_discrete(double q0, double s, const Target& t, double time) {
    const auto& atoms = discrete_atoms(t);
    if (time < 0.0) throw DomainError("closed_form_discrete: time must be nonnegative");
    const std::size_t m = atoms.size();
    auto W = [&](std::ptrdiff_t j) { return j < 0 ? 0.0 : atoms[static_cast<std::size_t>(j)].cumulative; };

    std::size_t ell = 0;
    while (ell + 1 < m && atoms[ell].cumulative < s) ++ell;
    const double c = atoms[ell].x;
    if (q0 == c) return c;

    double pos = q0;
    double elapsed = 0.0;
    auto advance = [&](double next, double plateau, double& out) {
        const double v = 2.0 * (s - plateau);
        const double dt = v == 0.0 ? kInf : (next - pos) / v;
        if (time < elapsed + dt) {
            out = pos + v * (time - elapsed);
            return true;
        }
        elapsed += dt;
        pos = next;
        return false;
    };

    double out = c;
    if (q0 < c) {
        std::size_t k = 0;
        while (k < m && atoms[k].x <= q0) ++k;
        double plateau = W(static_cast<std::ptrdiff_t>(k) - 1);
        for (std::size_t j = k; j <= ell; ++j) {
            if (advance(atoms[j].x, plateau, out)) return out;
            plateau = W(static_cast<std::ptrdiff_t>(j));
        }
    } else {
        std::size_t k = 0;
        while (k < m && atoms[k].x < q0) ++k;
        double plateau = W(static_cast<std::ptrdiff_t>(k) - 1);
        for (std::size_t j = k; j-- > ell;) {
            if (advance(atoms[j].x, plateau, out)) return out;
            plateau = W(static_cast<std::ptrdiff_t>(j) - 1);
        }
    }
    return c;
}

QuantileGrid closed_form_discrete(const QuantileGrid& q0, const Target& t, double time) {
    discrete_atoms(t);
    std::vector<double> x(q0.size());
    for (std::size_t i = 0; i < q0.size(); ++i) x[i] = closed_form_discrete(q0[i], q0.s(i), t, time);
    return QuantileGrid(std::move(x));
}

QuantileGrid closed_form_discrete(const Measure& mu0, const Target& t, double time, std::size_t n) {
    return closed_form_discrete(sample_quantile_grid(mu0, n), t, time);
}

std::vector<std::size_t> plateau_boundary_points(std::size_t n, const Target& t) {
    std::vector<std::size_t> out;
    if (!t.atoms()) return out;
    const auto& atoms = *t.atoms();
    for (std::size_t i = 0; i < n; ++i) {
        const double s = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        for (std::size_t k = 0; k + 1 < atoms.size(); ++k)
            if (atoms[k].cumulative == s) out.push_back(i);
    }
    return out;
}

namespace {

// Moves q0 towards c along dx/dt = 2(s - R(x)); c may be infinite.
double flow_towards(double q0, double c, double s, const Target& t, double time, double atol) {
    const double dir = c > q0 ? 1.0 : -1.0;
    const double start_speed = dir > 0 ? s - t.cdf_right(q0) : t.cdf_left(q0) - s;
    if (!(start_speed > 0.0)) return q0;

    const auto bps = t.measure().breakpoints();
    auto f = [&](double z, Side side) {
        const double r = side == Side::Right ? t.cdf_right(z) : t.cdf_left(z);
        return 1.0 / (dir * (s - r));
    };
    auto integral = [&](double u, double v) {
        const auto r = integrate_piecewise(f, std::min(u, v), std::max(u, v), bps, 1e-12, 40, 2);
        if (!std::isfinite(r.value)) throw NumericalError("pointwise_ode_solve: integrand not finite");
        return r.value;
    };
    const double phi = 2.0 * time;

    auto invert = [&](double lo, double hi, double cum) {
        while (std::abs(hi - lo) > atol) {
            const double mid = lo + 0.5 * (hi - lo);
            if (mid == lo || mid == hi) break;
            const double piece = integral(lo, mid);
            if (cum + piece < phi) {
                lo = mid;
                cum += piece;
            } else {
                hi = mid;
            }
        }
        return lo + 0.5 * (hi - lo);
    };

    double a = q0;
    double cum = 0.0;
    if (std::isfinite(c)) {
        // Geometric pieces towards c, where the integrand may blow up.
        double delta = 0.5 * std::abs(c - q0);
        for (;;) {
            const double b = c - dir * delta;
            if (b == a) return c;
            const double piece = integral(a, b);
            if (cum + piece >= phi) return invert(a, b, cum);
            cum += piece;
            if (piece < 1e-10 || cum > 1e6) return c;
            a = b;
            delta *= 0.5;
        }
    }
    double step = std::max(1.0, std::abs(q0));
    for (int k = 0; k < 2000; ++k) {
        const double b = a + dir * step;
        const double piece = integral(a, b);
        if (cum + piece >= phi) return invert(a, b, cum);
        cum += piece;
        a = b;
        step *= 2.0;
    }
    throw NumericalError("pointwise_ode_solve: no bracket towards an unbounded support end");
}

} // namespace

double pointwise_ode_solve(double q0_s, const Target& t, double s, double time, double atol) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("pointwise_ode_solve: s must lie in (0, 1)");
    if (!(time >= 0.0)) throw DomainError("pointwise_ode_solve: time must be nonnegative");
    if (!std::isfinite(q0_s)) throw DomainError("pointwise_ode_solve: initial value must be finite");
    const Measure& nu = t.measure();
    const double c = nu.quantile(s);
    if (t.cdf_right(c) <= s) {
        const double next = std::nextafter(s, 1.0);
        if (next < 1.0 && nu.quantile(next) - c > 1e-9 * std::max(1.0, std::abs(c)))
            throw DiscontinuityPoint("pointwise_ode_solve: Q_nu jumps at s = " + std::to_string(s));
    }
    if (time == 0.0) return q0_s;
    if (q0_s == c) return c;
    return flow_towards(q0_s, c, s, t, time, atol);
}

double pointwise_ode_endpoint(double q0, const Target& t, bool upper, double time, double atol) {
    if (!(time >= 0.0)) throw DomainError("pointwise_ode_endpoint: time must be nonnegative");
    const double c = upper ? t.hull().hi : t.hull().lo;
    if (!std::isfinite(q0) || time == 0.0 || q0 == c) return q0;
    return flow_towards(q0, c, upper ? 1.0 : 0.0, t, time, atol);
}

} // namespace mmdflow

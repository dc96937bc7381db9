#include "mmdflow/flow.hpp"

#include "mmdflow/errors.hpp"
#include "mmdflow/functional.hpp"

#include <algorithm>
#include <cmath>

namespace mmdflow {

std::string_view to_string(Scheme s) {
    switch (s) {
    case Scheme::ImplicitEuler: return "implicit";
    case Scheme::ExplicitEuler: return "explicit";
    case Scheme::ClosedFormDiscrete: return "closed-form";
    case Scheme::PointwiseODE: return "pointwise-ode";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name) {
    if (name == "implicit" || name == "implicit-euler") return Scheme::ImplicitEuler;
    if (name == "explicit" || name == "explicit-euler") return Scheme::ExplicitEuler;
    if (name == "closed-form" || name == "closed_form" || name == "closed-form-discrete") return Scheme::ClosedFormDiscrete;
    if (name == "pointwise-ode" || name == "pointwise_ode" || name == "ode") return Scheme::PointwiseODE;
    throw ConfigError("unknown scheme '" + std::string(name) + "' (implicit, explicit, closed-form, pointwise-ode)");
}

std::string_view to_string(MonotonicityPolicy p) {
    switch (p) {
    case MonotonicityPolicy::Error: return "error";
    case MonotonicityPolicy::Warn: return "warn";
    case MonotonicityPolicy::Project: return "project";
    }
    return "?";
}

MonotonicityPolicy parse_policy(std::string_view name) {
    if (name == "error") return MonotonicityPolicy::Error;
    if (name == "warn") return MonotonicityPolicy::Warn;
    if (name == "project") return MonotonicityPolicy::Project;
    throw ConfigError("unknown monotonicity policy '" + std::string(name) + "' (error, warn, project)");
}

void SolverConfig::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be positive");
    if (n < 2) throw ConfigError("n must be at least 2");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be nonnegative");
    if (!(bisect_atol > 0.0)) throw ConfigError("bisect_atol must be positive");
    const std::size_t steps = step_count();
    for (std::size_t k : snapshot_steps)
        if (k > steps)
            throw ConfigError("snapshot step " + std::to_string(k) + " is beyond t_end (" + std::to_string(steps) +
                              " steps)");
}

std::size_t SolverConfig::step_count() const {
    const double q = t_end / tau;
    const double r = std::round(q);
    if (std::abs(q - r) <= 1e-9 * std::max(1.0, q)) return static_cast<std::size_t>(r);
    return static_cast<std::size_t>(std::ceil(q));
}

bool SolverConfig::is_snapshot(std::size_t step) const {
    if (step == 0 || step == step_count()) return true;
    if (snapshot_stride != 0 && step % snapshot_stride == 0) return true;
    return std::find(snapshot_steps.begin(), snapshot_steps.end(), step) != snapshot_steps.end();
}

std::size_t FlowTrajectory::total_violations() const {
    std::size_t v = 0;
    for (const auto& d : diagnostics) v += d.mono_violations;
    return v;
}

StepDiagnostics diagnose(const QuantileGrid& g, const Target& t, const QuantileGrid& target_grid, std::size_t step,
                         double time, std::size_t violations, double supp_lo, double supp_hi) {
    StepDiagnostics d;
    d.step = step;
    d.time = time;
    d.F = functional_F(g, t);
    d.w2_to_target = w2_distance(g, target_grid);
    d.mono_violations = violations;
    d.supp_lo = supp_lo;
    d.supp_hi = supp_hi;
    const auto [mn, mx] = std::minmax_element(g.values().begin(), g.values().end());
    d.grid_min = *mn;
    d.grid_max = *mx;
    return d;
}

namespace {

double explicit_point(double x, double s, const Target& t, double tau) {
    if (!std::isfinite(x)) return x;
    return x - tau * (2.0 * t.cdf_right(x) - 2.0 * s);
}

double implicit_point(double x, double s, const Target& t, double tau, double atol) {
    if (!std::isfinite(x)) return x;
    const double y = x + 2.0 * tau * s;
    return resolvent_point(y, t, tau, y - 2.0 * tau, y, atol);
}

} // namespace

FlowTrajectory run_flow(const Measure& mu0, const Target& t, const SolverConfig& cfg) {
    cfg.validate();
    FlowTrajectory traj;
    traj.scheme = cfg.scheme;
    traj.tau = cfg.tau;
    traj.initial_hull = mu0.support_hull();
    traj.initial_convex_support = mu0.has_convex_support();
    traj.flagged_points = plateau_boundary_points(cfg.n, t);

    if (cfg.scheme == Scheme::ExplicitEuler && !t.is_continuous())
        throw AtomicTargetError("explicit Euler needs a target without atoms, got " + t.measure().to_string());
    if (cfg.scheme == Scheme::ClosedFormDiscrete && !t.atoms())
        throw NotDiscreteTarget("closed form needs a discrete target, got " + t.measure().to_string());

    const QuantileGrid g0 = sample_quantile_grid(mu0, cfg.n);
    const QuantileGrid target_grid = sample_quantile_grid(t.measure(), cfg.n);
    const double lo0 = traj.initial_hull.lo;
    const double hi0 = traj.initial_hull.hi;

    auto keep = [&](std::size_t k, double time, const QuantileGrid& g) {
        traj.steps.push_back(k);
        traj.times.push_back(time);
        traj.states.push_back(g);
    };
    keep(0, 0.0, g0);
    traj.diagnostics.push_back(diagnose(g0, t, target_grid, 0, 0.0, g0.monotonicity_violations(), lo0, hi0));

    const std::size_t steps = cfg.step_count();
    std::size_t k = 0;
    try {
        if (cfg.scheme == Scheme::ImplicitEuler || cfg.scheme == Scheme::ExplicitEuler) {
            QuantileGrid g = g0;
            double lo = lo0;
            double hi = hi0;
            for (k = 1; k <= steps; ++k) {
                const double time = static_cast<double>(k) * cfg.tau;
                std::size_t violations = 0;
                if (cfg.scheme == Scheme::ImplicitEuler) {
                    g = implicit_euler_step(g, t, cfg.tau, cfg.bisect_atol);
                    violations = g.monotonicity_violations();
                    lo = implicit_point(lo, 0.0, t, cfg.tau, cfg.bisect_atol);
                    hi = implicit_point(hi, 1.0, t, cfg.tau, cfg.bisect_atol);
                } else {
                    auto r = explicit_euler_step(g, t, cfg.tau, cfg.explicit_monotonicity_policy);
                    g = std::move(r.state);
                    violations = r.violations;
                    lo = explicit_point(lo, 0.0, t, cfg.tau);
                    hi = explicit_point(hi, 1.0, t, cfg.tau);
                }
                traj.diagnostics.push_back(diagnose(g, t, target_grid, k, time, violations, lo, hi));
                if (cfg.is_snapshot(k)) keep(k, time, g);
            }
        } else {
            for (k = 1; k <= steps; ++k) {
                if (!cfg.is_snapshot(k)) continue;
                const double time = static_cast<double>(k) * cfg.tau;
                std::vector<double> x(cfg.n);
                double lo = lo0;
                double hi = hi0;
                if (cfg.scheme == Scheme::ClosedFormDiscrete) {
                    for (std::size_t i = 0; i < cfg.n; ++i) x[i] = closed_form_discrete(g0[i], g0.s(i), t, time);
                    if (std::isfinite(lo)) lo = closed_form_discrete(lo, 0.0, t, time);
                    if (std::isfinite(hi)) hi = closed_form_discrete(hi, 1.0, t, time);
                } else {
                    for (std::size_t i = 0; i < cfg.n; ++i) x[i] = pointwise_ode_solve(g0[i], t, g0.s(i), time);
                    lo = pointwise_ode_endpoint(lo, t, false, time);
                    hi = pointwise_ode_endpoint(hi, t, true, time);
                }
                QuantileGrid g(std::move(x));
                traj.diagnostics.push_back(diagnose(g, t, target_grid, k, time, g.monotonicity_violations(), lo, hi));
                keep(k, time, g);
            }
        }
    } catch (Error& e) {
        e.attach_step(k);
        throw;
    }
    return traj;
}

} // namespace mmdflow

#pragma once

#include "mmdflow/measure.hpp"
#include "mmdflow/quantile_grid.hpp"
#include "mmdflow/solvers.hpp"
#include "mmdflow/target.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mmdflow {

enum class Scheme { ImplicitEuler, ExplicitEuler, ClosedFormDiscrete, PointwiseODE };

std::string_view to_string(Scheme s);
/// Accepts implicit, explicit, closed-form, pointwise-ode (and a few aliases).
Scheme parse_scheme(std::string_view name);
std::string_view to_string(MonotonicityPolicy p);
MonotonicityPolicy parse_policy(std::string_view name);

struct SolverConfig {
    Scheme scheme = Scheme::ImplicitEuler;
    double tau = 0.01;
    std::size_t n = 1000;
    double t_end = 1.0;
    double bisect_atol = 1e-12;
    MonotonicityPolicy explicit_monotonicity_policy = MonotonicityPolicy::Warn;
    /// States are kept every `snapshot_stride` steps (0: never) and at every
    /// step listed in `snapshot_steps`. Step 0 and the final step are always kept.
    std::size_t snapshot_stride = 1;
    std::vector<std::size_t> snapshot_steps;

    /// Throws ConfigError.
    void validate() const;
    /// round(t_end / tau), or the ceiling when t_end is not a multiple of tau.
    std::size_t step_count() const;
    bool is_snapshot(std::size_t step) const;
};

struct StepDiagnostics {
    std::size_t step = 0;
    double time = 0.0;
    double F = 0.0;
    double w2_to_target = 0.0;
    std::size_t mono_violations = 0;
    /// Tracked support endpoints g(0+) and g(1-); may be infinite.
    double supp_lo = 0.0;
    double supp_hi = 0.0;
    double grid_min = 0.0;
    double grid_max = 0.0;
};

struct FlowTrajectory {
    Scheme scheme = Scheme::ImplicitEuler;
    double tau = 0.0;
    std::vector<std::size_t> steps;
    std::vector<double> times;
    std::vector<QuantileGrid> states;
    /// Every step for the stepping schemes, snapshots only for the exact ones.
    std::vector<StepDiagnostics> diagnostics;
    Interval initial_hull;
    bool initial_convex_support = true;
    /// Grid points sitting exactly on a jump of Q_nu.
    std::vector<std::size_t> flagged_points;

    std::size_t total_violations() const;
};

StepDiagnostics diagnose(const QuantileGrid& g, const Target& t, const QuantileGrid& target_grid,
                         std::size_t step, double time, std::size_t violations, double supp_lo, double supp_hi);

/// Iterates the configured scheme from the quantile grid of mu0 up to
/// t_end. Errors from the scheme are rethrown with the step index attached.
FlowTrajectory run_flow(const Measure& mu0, const Target& t, const SolverConfig& cfg);

} // namespace mmdflow

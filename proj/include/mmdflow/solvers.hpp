#pragma once

#include "mmdflow/measure.hpp"
#include "mmdflow/quantile_grid.hpp"
#include "mmdflow/target.hpp"

#include <cstddef>
#include <vector>

namespace mmdflow {

enum class MonotonicityPolicy { Error, Warn, Project };

struct StepResult {
    QuantileGrid state;
    std::size_t violations = 0; // adjacent decreasing pairs before any projection
};

/// One implicit Euler step: for every grid point the unique x with
///   g_i + 2 tau s_i  in  x + 2 tau [R-(x), R+(x)].
/// All points share one bisection bracket, so the output is monotone
/// whenever g is.
QuantileGrid implicit_euler_step(const QuantileGrid& g, const Target& t, double tau, double bisect_atol = 1e-12);

/// Scalar resolvent: smallest x with x + 2 tau R+(x) >= y, searched in
/// [lo, hi]. Requires the predicate to fail below lo and hold at hi.
double resolvent_point(double y, const Target& t, double tau, double lo, double hi, double bisect_atol = 1e-12);

/// g - tau (2 R(g) - 2 s). Throws AtomicTargetError for atomic targets and
/// MonotonicityError under the Error policy.
StepResult explicit_euler_step(const QuantileGrid& g, const Target& t, double tau,
                               MonotonicityPolicy policy = MonotonicityPolicy::Warn);

/// Exact solution at level s for a discrete target, starting from q0 = Q_mu0(s).
/// Also valid at s = 0 and s = 1 (support endpoints). Throws NotDiscreteTarget.
double closed_form_discrete(double q0, double s, const Target& t, double time);
QuantileGrid closed_form_discrete(const QuantileGrid& q0, const Target& t, double time);
QuantileGrid closed_form_discrete(const Measure& mu0, const Target& t, double time, std::size_t n);

/// Grid indices whose level s_i equals a cumulative weight W_k of the
/// target, where Q_nu jumps and the closed form uses the left-continuous value.
std::vector<std::size_t> plateau_boundary_points(std::size_t n, const Target& t);

/// Exact solution g_s(time) at a continuity point s of Q_nu by inverting
/// Phi(x) = int_{q0}^{x} (s - R(z))^{-1} dz. Throws DiscontinuityPoint at
/// jumps of Q_nu.
double pointwise_ode_solve(double q0_s, const Target& t, double s, double time, double atol = 1e-13);

/// Same flow for the support endpoints s = 0 (towards the left end of the
/// target hull) and s = 1 (towards the right end).
double pointwise_ode_endpoint(double q0, const Target& t, bool upper, double time, double atol = 1e-13);

} // namespace mmdflow

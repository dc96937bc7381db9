#pragma once

#include "mmdflow/flow.hpp"
#include "mmdflow/measure.hpp"
#include "mmdflow/quantile_grid.hpp"
#include "mmdflow/target.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mmdflow {

/// Grid estimates of the largest lower and smallest upper Lipschitz
/// constants, from adjacent difference quotients n (g[i+1] - g[i]).
struct LipschitzReport {
    double l_low = 0.0;
    double lip = 0.0;
    double time = 0.0;
};

LipschitzReport lipschitz_estimate(const QuantileGrid& g, double time = 0.0);

/// Lower bound on L_low(g(t)):  l0 e^{-2t/L} + L (1 - e^{-2t/L}),  L = l_low_qnu.
/// Throws DomainError unless l_low_qnu > 0.
double smoothing_bound(double time, double l_low_g0, double l_low_qnu);

/// Upper bound on Lip(g(t)), same shape with L = lip_qnu. For lip_qnu = 0
/// (a single atom) only lip_g0 = 0 or time = 0 is meaningful; anything
/// else throws DomainError.
double lip_invariance_bound(double time, double lip_g0, double lip_qnu);

/// Gap between the continuous-time contraction factor e^{-2t/L} and the
/// per-step factor of the given scheme after `steps` steps of size tau.
/// Zero for the exact schemes.
double time_discretization_gap(Scheme scheme, double tau, std::size_t steps, double L);

enum class CheckStatus { Pass, Fail, Skipped };
std::string_view to_string(CheckStatus s);

struct BoundCheck {
    std::string check;
    double time = 0.0;
    double observed = 0.0;
    double bound = 0.0;
    double slack = 0.0;
    CheckStatus status = CheckStatus::Skipped;
};

/// Runs every applicable check on a trajectory. Inapplicable checks are
/// reported once with status Skipped.
std::vector<BoundCheck> check_trajectory(const FlowTrajectory& traj, const Target& t);

bool all_passed(const std::vector<BoundCheck>& checks);

void write_checks_csv(const std::vector<BoundCheck>& checks, const std::filesystem::path& path);

/// Probes random pairs to confirm that the quantile lower/upper Lipschitz
/// constants derived from the density agree with the CDF Lipschitz
/// constants (reciprocals of each other). True iff no disagreement.
bool duality_check(const Measure& m, std::size_t n_probe, std::uint64_t seed = 1);

} // namespace mmdflow

#pragma once

#include "mmdflow/measure.hpp"
#include "mmdflow/quantile_grid.hpp"
#include "mmdflow/target.hpp"

#include <vector>

namespace mmdflow {

/// Which element of 2[R-(u), R+(u)] - 2s to report.
enum class SubgradientSelection {
    Minimal, // least absolute value
    Left,
    Right,
};

/// Midpoint rule for  int_0^1 (1 - 2s) g(s) + E_nu|g(s) - X| ds.
double functional_F(const QuantileGrid& g, const Target& t);

/// The constant (1/2) int int K dnu dnu = -(1/2) E|X - X'| that turns
/// functional_F into the squared MMD.
double kernel_self_term(const Target& t);

/// int (R_mu - R_nu)^2 dx by adaptive quadrature. Throws NumericalError
/// when the quadrature does not converge.
double mmd_squared(const Measure& mu, const Measure& nu);

std::vector<double> subgradient(const QuantileGrid& g, const Target& t,
                                SubgradientSelection sel = SubgradientSelection::Minimal);

/// 2 R_nu(g_i) - 2 s_i. Throws AtomicTargetError if nu has atoms.
std::vector<double> gradient_continuous(const QuantileGrid& g, const Target& t);

} // namespace mmdflow

#pragma once

#include "mmdflow/measure.hpp"

#include <optional>
#include <vector>

namespace mmdflow {

/// Atom of a discrete target together with the cumulative weight W_k
/// through it.
struct TargetAtom {
    double x;
    double cumulative;
};

/// A target measure with the data the solvers need precomputed.
class Target {
public:
    explicit Target(Measure nu);

    const Measure& measure() const { return measure_; }
    const Interval& hull() const { return hull_; }

    /// Present iff the measure is Discrete.
    const std::optional<std::vector<TargetAtom>>& atoms() const { return atoms_; }
    /// Sorted locations of every atom (any variant), for exact snapping.
    const std::vector<double>& atom_locations() const { return atom_locations_; }
    /// R+ == R- everywhere.
    bool is_continuous() const { return atom_locations_.empty(); }

    /// Largest lower Lipschitz constant of Q_nu (1 / sup density).
    std::optional<double> l_low_q() const { return l_low_q_; }
    /// Smallest Lipschitz constant of Q_nu; +inf when unbounded.
    std::optional<double> lip_q() const { return lip_q_; }

    /// (1/2) E|X - X'|, X, X' ~ nu independent.
    double half_mean_distance() const { return half_mean_distance_; }

    double cdf_right(double x) const { return measure_.cdf_right(x); }
    double cdf_left(double x) const { return measure_.cdf_left(x); }

private:
    Measure measure_;
    Interval hull_;
    std::optional<std::vector<TargetAtom>> atoms_;
    std::vector<double> atom_locations_;
    std::optional<double> l_low_q_;
    std::optional<double> lip_q_;
    double half_mean_distance_;
};

} // namespace mmdflow

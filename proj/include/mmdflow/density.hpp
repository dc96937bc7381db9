#pragma once

#include "mmdflow/quantile_grid.hpp"

#include <filesystem>
#include <vector>

namespace mmdflow {

/// Absolutely continuous piece: constant density on [x_lo, x_hi].
struct DensitySegment {
    double x_lo;
    double x_hi;
    double density;

    double mass() const { return density * (x_hi - x_lo); }
};

struct DensityAndAtoms {
    std::vector<DensitySegment> segments;
    std::vector<Atom> atoms;

    double total_mass() const;
};

/// Reads a quantile grid back as a measure: runs of >= 2 equal values
/// (atol 1e-9 * max(1, |v|)) become atoms of mass run/n, the gaps between
/// the remaining consecutive distinct values carry density (1/n) / gap.
/// Neighbouring segments with equal density (relative 1e-6) are merged.
DensityAndAtoms density_and_atoms(const QuantileGrid& g);

/// CSV with columns `kind,x_lo,x_hi,density,mass`.
void write_density_csv(const DensityAndAtoms& d, const std::filesystem::path& path);

} // namespace mmdflow

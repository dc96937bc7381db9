#pragma once

#include "mmdflow/density.hpp"
#include "mmdflow/diagnostics.hpp"
#include "mmdflow/flow.hpp"
#include "mmdflow/run_spec.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mmdflow {

enum class PlotKind { Quantile, Density };

/// Writes one file per stored state: `quantile_<step>.csv` (s,g) or
/// `density_<step>.csv`, plus a matching `.svg` when `svg` is set.
/// Returns the written paths.
std::vector<std::filesystem::path> emit_plot_data(const FlowTrajectory& traj, PlotKind kind,
                                                  const std::filesystem::path& dir, bool svg = false);

/// `step,time,F,W2_to_target,mono_violations,supp_lo,supp_hi`
void write_diagnostics_csv(const FlowTrajectory& traj, const std::filesystem::path& path);

std::string snapshot_stem(std::size_t step);

std::string quantile_svg(const QuantileGrid& g, double time);
std::string density_svg(const DensityAndAtoms& d, double time);

/// Runs a spec and writes the requested artifacts plus `run.toml` and
/// `snapshots.csv` into spec.outdir. Returns the checks (empty unless requested).
std::vector<BoundCheck> execute_run(const RunSpec& spec, const std::filesystem::path& outdir);

/// Rebuilds a trajectory from a run directory: states from the stored
/// quantile CSVs, per-step rows from diagnostics.csv when present.
struct StoredRun {
    RunSpec spec;
    FlowTrajectory trajectory;
};
StoredRun load_run(const std::filesystem::path& dir);

} // namespace mmdflow

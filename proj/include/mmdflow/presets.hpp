#pragma once

#include "mmdflow/run_spec.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mmdflow {

struct Preset {
    std::string name;
    std::string mu0;
    std::string nu;
    std::string description;
};

const std::vector<Preset>& presets();

/// Throws ConfigError listing the valid names.
const Preset& find_preset(std::string_view name);

/// Runs for a preset at tau = 1/100, n = 1000, up to step 10000 with
/// snapshots at steps 10, 100, 200, 500, 1000, 10000: implicit Euler always,
/// explicit Euler for targets without atoms, the closed form for discrete
/// targets. Each run writes to `outdir/<scheme>`.
std::vector<RunSpec> preset_runs(const Preset& p, const std::filesystem::path& outdir);

} // namespace mmdflow

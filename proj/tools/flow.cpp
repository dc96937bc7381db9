#include "mmdflow/diagnostics.hpp"
#include "mmdflow/errors.hpp"
#include "mmdflow/output.hpp"
#include "mmdflow/presets.hpp"
#include "mmdflow/run_spec.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace mmdflow;

namespace {

constexpr int kOk = 0;
constexpr int kIoError = 1;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;
constexpr int kCheckFailed = 4;

struct Overrides {
    std::optional<double> tau;
    std::optional<std::size_t> n;
    std::optional<double> t_end;
    std::optional<std::string> scheme;
    std::optional<std::uint64_t> seed; // reserved

    void apply(RunSpec& spec) const {
        if (tau) spec.solver.tau = *tau;
        if (n) spec.solver.n = *n;
        if (t_end) spec.solver.t_end = *t_end;
        if (scheme) spec.solver.scheme = parse_scheme(*scheme);
        // Snapshots past a shortened horizon are dropped rather than rejected.
        if (t_end || tau) {
            const std::size_t steps = spec.solver.step_count();
            std::erase_if(spec.snapshot_steps, [&](std::size_t k) { return k > steps; });
            std::erase_if(spec.snapshot_times, [&](double t) { return t > spec.solver.t_end; });
        }
    }
};

void summarize(const std::vector<BoundCheck>& checks) {
    std::size_t pass = 0, fail = 0, skipped = 0;
    for (const auto& c : checks) {
        if (c.status == CheckStatus::Pass) ++pass;
        if (c.status == CheckStatus::Fail) ++fail;
        if (c.status == CheckStatus::Skipped) ++skipped;
    }
    std::printf("checks: %zu pass, %zu fail, %zu skipped\n", pass, fail, skipped);
    for (const auto& c : checks)
        if (c.status == CheckStatus::Fail)
            std::printf("  FAIL %-11s t=%-10.6g observed=%.10g bound=%.10g slack=%.3g\n", c.check.c_str(), c.time,
                        c.observed, c.bound, c.slack);
}

int run_error_code(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return kConfigError;
    if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const MonotonicityError*>(&e) ||
        dynamic_cast<const DiscontinuityPoint*>(&e) || dynamic_cast<const AtomicTargetError*>(&e) ||
        dynamic_cast<const NotDiscreteTarget*>(&e) || dynamic_cast<const DomainError*>(&e))
        return kNumericalError;
    return kIoError;
}

int execute(const RunSpec& spec, const fs::path& outdir) {
    try {
        std::printf("%s -> %s (%s, tau=%g, n=%zu, t_end=%g)\n", spec.mu0_expr.c_str(), spec.nu_expr.c_str(),
                    std::string(to_string(spec.solver.scheme)).c_str(), spec.solver.tau, spec.solver.n,
                    spec.solver.t_end);
        const auto checks = execute_run(spec, outdir);
        if (!spec.emit.empty()) std::printf("wrote %s\n", outdir.string().c_str());
        if (spec.emit.checks) summarize(checks);
        return kOk;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return run_error_code(e);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wasserstein gradient flows of the energy distance on the line"};
    app.require_subcommand(1);
    Overrides ov;
    app.add_option("--tau", ov.tau, "Step size")->check(CLI::PositiveNumber);
    app.add_option("--n", ov.n, "Grid size")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30));
    app.add_option("--t-end", ov.t_end, "Time horizon")->check(CLI::NonNegativeNumber);
    app.add_option("--scheme", ov.scheme, "implicit, explicit, closed-form or pointwise-ode");
    app.add_option("--seed", ov.seed, "Reserved; no core path is random");

    std::string spec_path;
    auto* run = app.add_subcommand("run", "Run a flow described by a spec file");
    run->add_option("spec", spec_path, "Run spec (TOML-like)")->required();
    std::optional<std::string> run_outdir;
    run->add_option("--outdir", run_outdir, "Output directory (overrides the spec)");

    std::string preset_name;
    std::string preset_outdir = "presets";
    auto* preset = app.add_subcommand("preset", "Reproduce one of the built-in setups");
    preset->add_option("name", preset_name, "Preset name")->required();
    preset->add_option("--outdir", preset_outdir, "Parent output directory");

    app.add_subcommand("presets", "List the built-in setups");

    std::string check_dir;
    bool strict = false;
    auto* check = app.add_subcommand("check", "Re-run diagnostics on a stored run directory");
    check->add_option("rundir", check_dir, "Directory written by 'run' or 'preset'")->required();
    check->add_flag("--strict", strict, "Exit with status 4 when a check fails");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    if (app.got_subcommand("presets")) {
        for (const auto& p : presets()) std::printf("%-20s %s\n", p.name.c_str(), p.description.c_str());
        return kOk;
    }

    if (run->parsed()) {
        RunSpec spec;
        try {
            spec = load_run_spec(spec_path);
            ov.apply(spec);
            if (run_outdir) spec.outdir = *run_outdir;
            spec.validate();
        } catch (const Error& e) {
            std::fprintf(stderr, "%s: %s\n", spec_path.c_str(), e.what());
            return kConfigError;
        }
        fs::path outdir = spec.outdir;
        if (outdir.is_relative() && !run_outdir) outdir = fs::path(spec_path).parent_path() / outdir;
        return execute(spec, outdir);
    }

    if (preset->parsed()) {
        std::vector<RunSpec> runs;
        try {
            const Preset& p = find_preset(preset_name);
            for (RunSpec spec : preset_runs(p, fs::path(preset_outdir) / p.name)) {
                if (ov.scheme && parse_scheme(*ov.scheme) != spec.solver.scheme) continue;
                Overrides rest = ov;
                rest.scheme.reset();
                rest.apply(spec);
                spec.validate();
                runs.push_back(std::move(spec));
            }
            if (runs.empty()) throw ConfigError("scheme '" + *ov.scheme + "' does not apply to preset " + p.name);
        } catch (const Error& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return kConfigError;
        }
        int status = kOk;
        for (const auto& spec : runs) {
            const int code = execute(spec, spec.outdir);
            if (code != kOk && status == kOk) status = code;
        }
        return status;
    }

    if (check->parsed()) {
        try {
            const StoredRun stored = load_run(check_dir);
            const auto checks = check_trajectory(stored.trajectory, Target(stored.spec.nu));
            write_checks_csv(checks, fs::path(check_dir) / "checks.csv");
            summarize(checks);
            if (strict && !all_passed(checks)) return kCheckFailed;
            return kOk;
        } catch (const ConfigError& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return kConfigError;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return run_error_code(e);
        }
    }
    return kOk;
}

#include "mmdflow/presets.hpp"

#include "mmdflow/errors.hpp"
#include "mmdflow/measure_parser.hpp"

namespace mmdflow {

const std::vector<Preset>& presets() {
    static const std::vector<Preset> all{
        {"gauss-shift", "gaussian(5, 1)", "gaussian(-5, 1)", "N(5, 1) to N(-5, 1)"},
        {"laplace-shift", "laplace(5, 1)", "laplace(-5, 1)", "Laplace(5, 1) to Laplace(-5, 1)"},
        {"unif-to-unif", "uniform(0, 1)", "uniform(2, 3)", "U[0, 1] to U[2, 3]"},
        {"gauss-scales", "gaussian(0, sqrt(1/sqrt(2)))", "gaussian(0, sqrt(sqrt(2)))",
         "N(0, 1/sqrt 2) to N(0, sqrt 2), second parameter a variance"},
        {"bimodal-to-gauss", "mixture(0.5*gaussian(-10, 1) + 0.5*gaussian(10, 1))", "gaussian(0, 1)",
         "equal mixture of N(-10, 1) and N(10, 1) to N(0, 1)"},
        {"gauss-to-bimodal", "gaussian(0, 1)", "mixture(0.5*gaussian(-10, 1) + 0.5*gaussian(10, 1))",
         "N(0, 1) to the equal mixture of N(-10, 1) and N(10, 1)"},
        {"folded-norm", "folded_normal(0, 1)", "folded_normal(2, 1)", "folded normal FN(0, 1) to FN(2, 1)"},
        {"dirac-to-dirac", "dirac(-1)", "dirac(0)", "point mass at -1 to point mass at 0"},
        {"three-to-two-diracs", "discrete(x=[-1, 0.5, 2], w=[1/3, 1/3, 1/3])", "discrete(x=[0, 1], w=[1/4, 3/4])",
         "three equal atoms to 1/4 at 0 and 3/4 at 1"},
        {"dirac-to-unif", "dirac(0)", "uniform(0, 1)", "point mass at 0 to U[0, 1]"},
    };
    return all;
}

const Preset& find_preset(std::string_view name) {
    for (const auto& p : presets())
        if (p.name == name) return p;
    std::string names;
    for (const auto& p : presets()) names += (names.empty() ? "" : ", ") + p.name;
    throw ConfigError("unknown preset '" + std::string(name) + "'; valid presets: " + names);
}

std::vector<RunSpec> preset_runs(const Preset& p, const std::filesystem::path& outdir) {
    RunSpec base;
    base.mu0_expr = p.mu0;
    base.nu_expr = p.nu;
    base.mu0 = parse_measure(p.mu0);
    base.nu = parse_measure(p.nu);
    base.solver.tau = 0.01;
    base.solver.n = 1000;
    base.solver.t_end = 100.0;
    base.snapshot_steps = {10, 100, 200, 500, 1000, 10000};
    base.emit.svg = true;

    std::vector<Scheme> schemes{Scheme::ImplicitEuler};
    if (!base.nu.has_atoms()) schemes.push_back(Scheme::ExplicitEuler);
    if (std::holds_alternative<Measure::Discrete>(base.nu.data())) schemes.push_back(Scheme::ClosedFormDiscrete);

    std::vector<RunSpec> runs;
    for (Scheme s : schemes) {
        RunSpec r = base;
        r.solver.scheme = s;
        r.outdir = outdir / std::string(to_string(s));
        runs.push_back(std::move(r));
    }
    return runs;
}

} // namespace mmdflow

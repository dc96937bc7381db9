#include "mmdflow/output.hpp"

#include "mmdflow/csv.hpp"
#include "mmdflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mmdflow {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 48.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Frame {
    double x0, x1, y0, y1;

    double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
    double py(double y) const { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); }
};

Frame padded(double x0, double x1, double y0, double y1) {
    if (!(x1 > x0)) x0 -= 0.5, x1 += 0.5;
    if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
    const double dy = 0.05 * (y1 - y0);
    return {x0, x1, y0 - dy, y1 + dy};
}

void open_svg(std::ostringstream& out, const Frame& f, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin << "\" height=\""
        << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kMargin / 2 << "\" text-anchor=\"middle\">" << title << "</text>\n";
    out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16 << "\" text-anchor=\"middle\">"
        << label(f.x0) << "</text>\n";
    out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 16 << "\" text-anchor=\"middle\">"
        << label(f.x1) << "</text>\n";
    out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kHeight - kMargin << "\" text-anchor=\"end\">" << label(f.y0)
        << "</text>\n";
    out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 4 << "\" text-anchor=\"end\">" << label(f.y1)
        << "</text>\n";
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed: " + path.string());
}

} // namespace

std::string snapshot_stem(std::size_t step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06zu", step);
    return buf;
}

std::string quantile_svg(const QuantileGrid& g, double time) {
    const auto [mn, mx] = std::minmax_element(g.values().begin(), g.values().end());
    const Frame f = padded(0.0, 1.0, *mn, *mx);
    std::ostringstream out;
    open_svg(out, f, "quantile function, t = " + label(time));
    out << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < g.size(); ++i) out << fmt(f.px(g.s(i))) << ',' << fmt(f.py(g[i])) << ' ';
    out << "\"/>\n</svg>\n";
    return out.str();
}

std::string density_svg(const DensityAndAtoms& d, double time) {
    double x0 = kInf, x1 = -kInf, ymax = 0.0;
    for (const auto& s : d.segments) {
        x0 = std::min(x0, s.x_lo);
        x1 = std::max(x1, s.x_hi);
        ymax = std::max(ymax, s.density);
    }
    double mass_max = 0.0;
    for (const auto& a : d.atoms) {
        x0 = std::min(x0, a.location);
        x1 = std::max(x1, a.location);
        mass_max = std::max(mass_max, a.mass);
    }
    if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0;
    const double pad = 0.05 * std::max(x1 - x0, 1e-9);
    const Frame f = padded(x0 - pad, x1 + pad, 0.0, ymax > 0.0 ? ymax : 1.0);
    std::ostringstream out;
    open_svg(out, f, "density, t = " + label(time));
    if (!d.segments.empty()) {
        out << "<polygon fill=\"#bbbbbb\" stroke=\"#666\" stroke-width=\"0.5\" points=\"";
        out << fmt(f.px(d.segments.front().x_lo)) << ',' << fmt(f.py(0.0)) << ' ';
        for (const auto& s : d.segments)
            out << fmt(f.px(s.x_lo)) << ',' << fmt(f.py(s.density)) << ' ' << fmt(f.px(s.x_hi)) << ','
                << fmt(f.py(s.density)) << ' ';
        out << fmt(f.px(d.segments.back().x_hi)) << ',' << fmt(f.py(0.0)) << "\"/>\n";
    }
    // Atoms are drawn as spikes whose height is proportional to their mass.
    for (const auto& a : d.atoms) {
        const double top = kMargin + (1.0 - a.mass / std::max(mass_max, 1e-300)) * 0.9 * (kHeight - 2 * kMargin);
        out << "<line x1=\"" << fmt(f.px(a.location)) << "\" y1=\"" << fmt(f.py(f.y0)) << "\" x2=\""
            << fmt(f.px(a.location)) << "\" y2=\"" << fmt(top) << "\" stroke=\"#c0392b\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fmt(f.px(a.location)) << "\" y=\"" << fmt(top - 4) << "\" text-anchor=\"middle\">"
            << label(a.mass) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::vector<std::filesystem::path> emit_plot_data(const FlowTrajectory& traj, PlotKind kind,
                                                  const std::filesystem::path& dir, bool svg) {
    if (traj.states.empty()) throw DomainError("emit_plot_data: empty trajectory");
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (std::size_t j = 0; j < traj.states.size(); ++j) {
        const std::string stem = (kind == PlotKind::Quantile ? "quantile_" : "density_") + snapshot_stem(traj.steps[j]);
        const auto csv_path = dir / (stem + ".csv");
        if (kind == PlotKind::Quantile) {
            write_quantile_csv(traj.states[j], csv_path);
            if (svg) write_text(dir / (stem + ".svg"), quantile_svg(traj.states[j], traj.times[j]));
        } else {
            const auto d = density_and_atoms(traj.states[j]);
            write_density_csv(d, csv_path);
            if (svg) write_text(dir / (stem + ".svg"), density_svg(d, traj.times[j]));
        }
        written.push_back(csv_path);
        if (svg) written.push_back(dir / (stem + ".svg"));
    }
    return written;
}

void write_diagnostics_csv(const FlowTrajectory& traj, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "step,time,F,W2_to_target,mono_violations,supp_lo,supp_hi\n";
    for (const auto& d : traj.diagnostics)
        out << d.step << ',' << csv::number(d.time) << ',' << csv::number(d.F) << ',' << csv::number(d.w2_to_target)
            << ',' << d.mono_violations << ',' << csv::number(d.supp_lo) << ',' << csv::number(d.supp_hi) << '\n';
    if (!out) throw Error("write failed: " + path.string());
}

std::vector<BoundCheck> execute_run(const RunSpec& spec, const std::filesystem::path& outdir) {
    spec.validate();
    const Target target(spec.nu);
    const FlowTrajectory traj = run_flow(spec.mu0, target, spec.resolved_solver());
    std::vector<BoundCheck> checks;
    if (spec.emit.empty()) return checks;

    std::filesystem::create_directories(outdir);
    RunSpec stored = spec;
    stored.outdir = ".";
    write_text(outdir / "run.toml", to_toml(stored));

    std::ostringstream index;
    index << "step,time\n";
    for (std::size_t j = 0; j < traj.steps.size(); ++j) index << traj.steps[j] << ',' << csv::number(traj.times[j]) << '\n';
    write_text(outdir / "snapshots.csv", index.str());

    if (spec.emit.quantiles || spec.emit.svg) emit_plot_data(traj, PlotKind::Quantile, outdir, spec.emit.svg);
    if (spec.emit.densities) emit_plot_data(traj, PlotKind::Density, outdir, spec.emit.svg);
    if (spec.emit.diagnostics) write_diagnostics_csv(traj, outdir / "diagnostics.csv");
    if (spec.emit.checks) {
        checks = check_trajectory(traj, target);
        write_checks_csv(checks, outdir / "checks.csv");
    }
    return checks;
}

StoredRun load_run(const std::filesystem::path& dir) {
    StoredRun run{load_run_spec(dir / "run.toml"), {}};
    const SolverConfig cfg = run.spec.resolved_solver();
    FlowTrajectory& traj = run.trajectory;
    traj.scheme = cfg.scheme;
    traj.tau = cfg.tau;
    traj.initial_hull = run.spec.mu0.support_hull();
    traj.initial_convex_support = run.spec.mu0.has_convex_support();
    const Target target(run.spec.nu);
    traj.flagged_points = plateau_boundary_points(cfg.n, target);

    const auto index = csv::read(dir / "snapshots.csv");
    const std::size_t c_step = index.column("step");
    const std::size_t c_time = index.column("time");
    for (const auto& row : index.rows) {
        const auto step = static_cast<std::size_t>(csv::to_double(row.at(c_step), dir / "snapshots.csv"));
        const auto path = dir / ("quantile_" + snapshot_stem(step) + ".csv");
        if (!std::filesystem::exists(path)) throw Error("missing snapshot " + path.string());
        traj.steps.push_back(step);
        traj.times.push_back(csv::to_double(row.at(c_time), dir / "snapshots.csv"));
        traj.states.push_back(read_quantile_csv(path));
    }
    if (traj.states.empty()) throw Error("no snapshots in " + dir.string());

    // Snapshot rows are recomputed from the stored states; the per-step
    // rows in between keep their recorded values and have no grid extent.
    const QuantileGrid target_grid = sample_quantile_grid(run.spec.nu, traj.states.front().size());
    std::vector<StepDiagnostics> stored;
    const auto diag_path = dir / "diagnostics.csv";
    if (std::filesystem::exists(diag_path)) {
        const auto t = csv::read(diag_path);
        const std::size_t cs = t.column("step"), ct = t.column("time"), cf = t.column("F"),
                          cw = t.column("W2_to_target"), cm = t.column("mono_violations"), cl = t.column("supp_lo"),
                          ch = t.column("supp_hi");
        for (const auto& row : t.rows) {
            StepDiagnostics d;
            d.step = static_cast<std::size_t>(csv::to_double(row.at(cs), diag_path));
            d.time = csv::to_double(row.at(ct), diag_path);
            d.F = csv::to_double(row.at(cf), diag_path);
            d.w2_to_target = csv::to_double(row.at(cw), diag_path);
            d.mono_violations = static_cast<std::size_t>(csv::to_double(row.at(cm), diag_path));
            d.supp_lo = csv::to_double(row.at(cl), diag_path);
            d.supp_hi = csv::to_double(row.at(ch), diag_path);
            d.grid_min = NAN;
            d.grid_max = NAN;
            stored.push_back(d);
        }
    }
    std::size_t j = 0;
    for (const auto& d : stored) {
        while (j < traj.steps.size() && traj.steps[j] < d.step) ++j;
        if (j < traj.steps.size() && traj.steps[j] == d.step) {
            traj.diagnostics.push_back(diagnose(traj.states[j], target, target_grid, d.step, d.time,
                                                traj.states[j].monotonicity_violations(), d.supp_lo, d.supp_hi));
        } else {
            traj.diagnostics.push_back(d);
        }
    }
    if (stored.empty()) {
        const double lo = traj.initial_hull.lo, hi = traj.initial_hull.hi;
        for (std::size_t k = 0; k < traj.states.size(); ++k)
            traj.diagnostics.push_back(diagnose(traj.states[k], target, target_grid, traj.steps[k], traj.times[k],
                                                traj.states[k].monotonicity_violations(), k == 0 ? lo : NAN,
                                                k == 0 ? hi : NAN));
    }
    return run;
}

} // namespace mmdflow

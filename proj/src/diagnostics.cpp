#include "mmdflow/diagnostics.hpp"

#include "mmdflow/csv.hpp"
#include "mmdflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

namespace mmdflow {

LipschitzReport lipschitz_estimate(const QuantileGrid& g, double time) {
    if (g.size() < 2) throw DomainError("lipschitz_estimate: need at least two grid points");
    const double n = static_cast<double>(g.size());
    LipschitzReport r{kInf, -kInf, time};
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        const double q = n * (g[i + 1] - g[i]);
        r.l_low = std::min(r.l_low, q);
        r.lip = std::max(r.lip, q);
    }
    return r;
}

double smoothing_bound(double time, double l_low_g0, double l_low_qnu) {
    if (!(l_low_qnu > 0.0)) throw DomainError("smoothing_bound: L_low(Q_nu) must be positive");
    if (!(time >= 0.0)) throw DomainError("smoothing_bound: time must be nonnegative");
    if (std::isinf(l_low_qnu)) return l_low_g0 + 2.0 * time;
    const double e = std::exp(-2.0 * time / l_low_qnu);
    return l_low_g0 * e + l_low_qnu * (1.0 - e);
}

double lip_invariance_bound(double time, double lip_g0, double lip_qnu) {
    if (!(time >= 0.0)) throw DomainError("lip_invariance_bound: time must be nonnegative");
    if (!(lip_qnu >= 0.0) || !std::isfinite(lip_qnu))
        throw DomainError("lip_invariance_bound: Lip(Q_nu) must be finite and nonnegative");
    if (lip_qnu == 0.0) {
        if (time == 0.0) return lip_g0;
        if (lip_g0 == 0.0) return 0.0;
        throw DomainError("lip_invariance_bound: Lip(Q_nu) = 0 needs Lip(g0) = 0");
    }
    const double e = std::exp(-2.0 * time / lip_qnu);
    return lip_g0 * e + lip_qnu * (1.0 - e);
}

double time_discretization_gap(Scheme scheme, double tau, std::size_t steps, double L) {
    if (!(L > 0.0) || !std::isfinite(L)) return 0.0;
    const double k = static_cast<double>(steps);
    const double exact = std::exp(-2.0 * k * tau / L);
    switch (scheme) {
    case Scheme::ImplicitEuler: return std::abs(std::pow(1.0 + 2.0 * tau / L, -k) - exact);
    case Scheme::ExplicitEuler: return std::abs(std::pow(1.0 - 2.0 * tau / L, k) - exact);
    default: return 0.0;
    }
}

std::string_view to_string(CheckStatus s) {
    switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
    }
    return "?";
}

namespace {

BoundCheck skipped(std::string name) {
    BoundCheck c;
    c.check = std::move(name);
    c.observed = NAN;
    c.bound = NAN;
    c.slack = NAN;
    return c;
}

BoundCheck at_least(std::string name, double time, double observed, double bound, double slack) {
    return {std::move(name), time, observed, bound, slack,
            observed >= bound - slack ? CheckStatus::Pass : CheckStatus::Fail};
}

BoundCheck at_most(std::string name, double time, double observed, double bound, double slack) {
    return {std::move(name), time, observed, bound, slack,
            observed <= bound + slack ? CheckStatus::Pass : CheckStatus::Fail};
}

bool is_snapshot_step(const FlowTrajectory& traj, std::size_t step) {
    return std::binary_search(traj.steps.begin(), traj.steps.end(), step);
}

// Step-by-step comparison of a diagnostics column; reports snapshot rows
// and every failing step.
template <class Get>
void sequence_check(std::vector<BoundCheck>& out, const FlowTrajectory& traj, const std::string& name, Get get,
                    bool nonincreasing, double slack) {
    const auto& d = traj.diagnostics;
    for (std::size_t k = 1; k < d.size(); ++k) {
        const double prev = get(d[k - 1]);
        const double cur = get(d[k]);
        if (std::isnan(prev) || std::isnan(cur)) continue;
        BoundCheck c = nonincreasing ? at_most(name, d[k].time, cur, prev, slack)
                                     : at_least(name, d[k].time, cur, prev, slack);
        if (std::isinf(prev) && prev == cur) c.status = CheckStatus::Pass;
        if (c.status == CheckStatus::Fail || is_snapshot_step(traj, d[k].step)) out.push_back(c);
    }
}

} // namespace

std::vector<BoundCheck> check_trajectory(const FlowTrajectory& traj, const Target& t) {
    if (traj.states.empty()) throw DomainError("check_trajectory: empty trajectory");
    std::vector<BoundCheck> out;
    const std::size_t n = traj.states.front().size();
    const double grid_slack = 2.0 / static_cast<double>(n) + 1e-6;

    if (traj.scheme == Scheme::ExplicitEuler) {
        out.push_back(skipped("cone"));
    } else {
        for (std::size_t j = 0; j < traj.states.size(); ++j)
            out.push_back(at_most("cone", traj.times[j], static_cast<double>(traj.states[j].monotonicity_violations()),
                                  0.0, 0.0));
    }

    if (traj.scheme == Scheme::ImplicitEuler)
        sequence_check(out, traj, "energy", [](const StepDiagnostics& d) { return d.F; }, true, 1e-9);
    else
        out.push_back(skipped("energy"));

    if (traj.initial_convex_support) {
        sequence_check(out, traj, "support_lo", [](const StepDiagnostics& d) { return d.supp_lo; }, true, 1e-9);
        sequence_check(out, traj, "support_hi", [](const StepDiagnostics& d) { return d.supp_hi; }, false, 1e-9);
    } else {
        out.push_back(skipped("support_lo"));
        out.push_back(skipped("support_hi"));
    }

    const Interval joint{std::min(traj.initial_hull.lo, t.hull().lo), std::max(traj.initial_hull.hi, t.hull().hi)};
    for (const auto& d : traj.diagnostics) {
        const bool snap = is_snapshot_step(traj, d.step);
        if (std::isnan(d.grid_min)) continue;
        if (std::isfinite(joint.lo)) {
            auto c = at_least("hull_lo", d.time, d.grid_min, joint.lo, 1e-9);
            if (snap || c.status == CheckStatus::Fail) out.push_back(c);
        }
        if (std::isfinite(joint.hi)) {
            auto c = at_most("hull_hi", d.time, d.grid_max, joint.hi, 1e-9);
            if (snap || c.status == CheckStatus::Fail) out.push_back(c);
        }
    }
    if (!std::isfinite(joint.lo)) out.push_back(skipped("hull_lo"));
    if (!std::isfinite(joint.hi)) out.push_back(skipped("hull_hi"));

    const LipschitzReport initial = lipschitz_estimate(traj.states.front(), 0.0);
    const double l_q = t.l_low_q().value_or(0.0);
    if (l_q > 0.0 && std::isfinite(l_q)) {
        for (std::size_t j = 0; j < traj.states.size(); ++j) {
            const double time = traj.times[j];
            const double bound = smoothing_bound(time, initial.l_low, l_q);
            const double gap = std::abs(l_q - initial.l_low) * time_discretization_gap(traj.scheme, traj.tau, traj.steps[j], l_q);
            out.push_back(at_least("smoothing", time, lipschitz_estimate(traj.states[j], time).l_low, bound,
                                   grid_slack + gap));
        }
    } else {
        out.push_back(skipped("smoothing"));
    }

    const auto lip_q = t.lip_q();
    const bool lip_applies = lip_q && std::isfinite(*lip_q) && t.hull().bounded() &&
                             t.measure().has_convex_support() && t.hull().contains(traj.initial_hull) &&
                             (*lip_q > 0.0 || initial.lip == 0.0);
    if (lip_applies) {
        for (std::size_t j = 0; j < traj.states.size(); ++j) {
            const double time = traj.times[j];
            const double bound = lip_invariance_bound(time, initial.lip, *lip_q);
            const double gap = std::abs(*lip_q - initial.lip) * time_discretization_gap(traj.scheme, traj.tau, traj.steps[j], *lip_q);
            out.push_back(at_most("lipschitz", time, lipschitz_estimate(traj.states[j], time).lip, bound,
                                  grid_slack + gap));
        }
    } else {
        out.push_back(skipped("lipschitz"));
    }
    return out;
}

bool all_passed(const std::vector<BoundCheck>& checks) {
    return std::none_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.status == CheckStatus::Fail; });
}

void write_checks_csv(const std::vector<BoundCheck>& checks, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "check,time,observed,bound,slack,status\n";
    auto num = [](double v) { return std::isnan(v) ? std::string() : csv::number(v); };
    for (const auto& c : checks)
        out << c.check << ',' << num(c.time) << ',' << num(c.observed) << ',' << num(c.bound) << ',' << num(c.slack)
            << ',' << to_string(c.status) << '\n';
    if (!out) throw Error("write failed: " + path.string());
}

bool duality_check(const Measure& m, std::size_t n_probe, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Interval range = effective_range(m, 1e-9);
    const double min_gap = 1e-3;

    auto s_pair = [&] {
        double a = unit(rng), b = unit(rng);
        if (a > b) std::swap(a, b);
        a = std::clamp(a, 1e-9, 1.0 - 1e-9);
        b = std::clamp(std::max(b, a + min_gap), 1e-9, 1.0 - 1e-9);
        return std::pair{a, b};
    };
    auto x_pair = [&](double lo, double hi) {
        double a = lo + (hi - lo) * unit(rng), b = lo + (hi - lo) * unit(rng);
        if (a > b) std::swap(a, b);
        b = std::max(b, a + min_gap * (hi - lo));
        return std::pair{a, b};
    };
    auto slack = [](double scale, double width) { return 1e-9 + 1e-11 * std::max(1.0, scale) / width; };

    bool consistent = true;
    const bool atoms = m.has_atoms();
    // Lower constant: Q in D_L^- with L = 1 / sup density  <=>  R is 1/L-Lipschitz.
    if (!atoms) {
        const double L = 1.0 / m.sup_density();
        bool q_ok = true, r_ok = true;
        for (std::size_t p = 0; p < n_probe; ++p) {
            const auto [s1, s2] = s_pair();
            const double q1 = m.quantile(s1), q2 = m.quantile(s2);
            if ((q2 - q1) / (s2 - s1) < L - slack(std::max(std::abs(q1), std::abs(q2)), s2 - s1) * L) q_ok = false;
            const auto [x1, x2] = x_pair(range.lo, range.hi);
            if ((m.cdf_right(x2) - m.cdf_right(x1)) / (x2 - x1) > (1.0 / L) * (1.0 + 1e-9) + slack(1.0, x2 - x1))
                r_ok = false;
        }
        consistent = consistent && q_ok == r_ok && q_ok;
    }
    // Upper constant on a bounded convex hull: Q in D_L^+  <=>  R^{-1}-slope >= 1/L.
    const Interval hull = m.support_hull();
    if (!atoms && hull.bounded() && m.has_convex_support()) {
        const double inf_density = m.inf_density_on_hull();
        if (inf_density > 0.0) {
            const double L = 1.0 / inf_density;
            bool q_ok = true, r_ok = true;
            for (std::size_t p = 0; p < n_probe; ++p) {
                const auto [s1, s2] = s_pair();
                const double q1 = m.quantile(s1), q2 = m.quantile(s2);
                if ((q2 - q1) / (s2 - s1) > L * (1.0 + 1e-9) + slack(std::max(std::abs(q1), std::abs(q2)), s2 - s1))
                    q_ok = false;
                const auto [x1, x2] = x_pair(hull.lo, hull.hi);
                if ((m.cdf_right(x2) - m.cdf_right(x1)) / (x2 - x1) < (1.0 / L) * (1.0 - 1e-9) - slack(1.0, x2 - x1))
                    r_ok = false;
            }
            consistent = consistent && q_ok == r_ok && q_ok;
        }
    }
    return consistent;
}

} // namespace mmdflow

#include "mmdflow/density.hpp"

#include "mmdflow/csv.hpp"
#include "mmdflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace mmdflow {

double DensityAndAtoms::total_mass() const {
    double m = 0.0;
    for (const auto& s : segments) m += s.mass();
    for (const auto& a : atoms) m += a.mass;
    return m;
}

namespace {

struct Level {
    double value;
    std::size_t count;
};

bool same_value(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

} // namespace

DensityAndAtoms density_and_atoms(const QuantileGrid& g) {
    const auto v = g.values();
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    const double unit = 1.0 / static_cast<double>(sorted.size());

    std::vector<Level> levels;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i + 1;
        while (j < sorted.size() && same_value(sorted[i], sorted[j])) ++j;
        levels.push_back({sorted[i], j - i});
        i = j;
    }

    DensityAndAtoms out;
    for (const auto& l : levels)
        if (l.count >= 2) out.atoms.push_back({l.value, static_cast<double>(l.count) * unit});

    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
        if (levels[k].count >= 2 || levels[k + 1].count >= 2) continue;
        const double lo = levels[k].value;
        const double hi = levels[k + 1].value;
        const double d = unit / (hi - lo);
        if (!out.segments.empty()) {
            auto& last = out.segments.back();
            if (last.x_hi == lo && std::abs(last.density - d) <= 1e-6 * std::max(last.density, d)) {
                const double mass = last.mass() + unit;
                last.x_hi = hi;
                last.density = mass / (hi - last.x_lo);
                continue;
            }
        }
        out.segments.push_back({lo, hi, d});
    }
    return out;
}

void write_density_csv(const DensityAndAtoms& d, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "kind,x_lo,x_hi,density,mass\n";
    for (const auto& s : d.segments)
        out << "ac," << csv::number(s.x_lo) << ',' << csv::number(s.x_hi) << ',' << csv::number(s.density) << ','
            << csv::number(s.mass()) << '\n';
    for (const auto& a : d.atoms)
        out << "atom," << csv::number(a.location) << ',' << csv::number(a.location) << ",," << csv::number(a.mass)
            << '\n';
    if (!out) throw Error("write failed: " + path.string());
}

} // namespace mmdflow

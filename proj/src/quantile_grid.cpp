#include "mmdflow/quantile_grid.hpp"

#include "mmdflow/csv.hpp"
#include "mmdflow/errors.hpp"

#include <cmath>
#include <fstream>

namespace mmdflow {

QuantileGrid::QuantileGrid(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw DomainError("QuantileGrid: need at least one value");
    for (double v : values_)
        if (!std::isfinite(v)) throw DomainError("QuantileGrid: values must be finite");
}

std::size_t QuantileGrid::monotonicity_violations() const {
    std::size_t count = 0;
    for (std::size_t i = 0; i + 1 < values_.size(); ++i)
        if (values_[i + 1] < values_[i]) ++count;
    return count;
}

QuantileGrid sample_quantile_grid(const Measure& m, std::size_t n) {
    if (n < 2) throw DomainError("sample_quantile_grid: n must be at least 2");
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = m.quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
    return QuantileGrid(std::move(v));
}

Measure as_measure(const QuantileGrid& g) {
    return Measure::grid_quantile(std::vector<double>(g.values().begin(), g.values().end()));
}

double grid_dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionMismatch("grid_dot: size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum / static_cast<double>(a.size());
}

double w2_distance(const QuantileGrid& a, const QuantileGrid& b) {
    if (a.size() != b.size())
        throw DimensionMismatch("w2_distance: grid sizes differ (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(a.size()));
}

void write_quantile_csv(const QuantileGrid& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "s,g\n";
    for (std::size_t i = 0; i < g.size(); ++i) out << csv::number(g.s(i)) << ',' << csv::number(g[i]) << '\n';
    if (!out) throw Error("write failed: " + path.string());
}

QuantileGrid read_quantile_csv(const std::filesystem::path& path) {
    const auto table = csv::read(path);
    const std::size_t col = table.column("g");
    std::vector<double> values;
    values.reserve(table.rows.size());
    for (const auto& row : table.rows) values.push_back(csv::to_double(row.at(col), path));
    return QuantileGrid(std::move(values));
}

} // namespace mmdflow

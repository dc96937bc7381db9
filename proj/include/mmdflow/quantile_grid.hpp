#pragma once

#include "mmdflow/measure.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace mmdflow {

/// Quantile function sampled on the midpoint grid s_i = (i + 1/2) / n.
///
/// Values must be finite. Monotonicity is not enforced at construction
/// (an explicit Euler step may break it); use is_monotone() to test cone
/// membership.
class QuantileGrid {
public:
    explicit QuantileGrid(std::vector<double> values);

    std::size_t size() const { return values_.size(); }
    double s(std::size_t i) const { return (static_cast<double>(i) + 0.5) / static_cast<double>(values_.size()); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }
    double front() const { return values_.front(); }
    double back() const { return values_.back(); }

    /// Number of adjacent pairs with g[i+1] < g[i]; zero tolerance.
    std::size_t monotonicity_violations() const;
    bool is_monotone() const { return monotonicity_violations() == 0; }

    bool operator==(const QuantileGrid&) const = default;

private:
    std::vector<double> values_;
};

/// Midpoint samples Q_m(s_i), i = 0..n-1. Requires n >= 2.
QuantileGrid sample_quantile_grid(const Measure& m, std::size_t n);

/// The push-forward of Lebesgue measure on (0,1) under the grid step function.
Measure as_measure(const QuantileGrid& g);

/// sqrt((1/n) sum (a_i - b_i)^2); throws DimensionMismatch on size mismatch.
double w2_distance(const QuantileGrid& a, const QuantileGrid& b);

/// Grid inner product (1/n) sum a_i b_i.
double grid_dot(std::span<const double> a, std::span<const double> b);

/// CSV with header `s,g`, one row per grid point, 17 significant digits.
void write_quantile_csv(const QuantileGrid& g, const std::filesystem::path& path);
QuantileGrid read_quantile_csv(const std::filesystem::path& path);

} // namespace mmdflow

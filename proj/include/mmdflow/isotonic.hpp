#pragma once

#include <vector>

namespace mmdflow {

/// Least-squares projection onto nondecreasing sequences (equal weights),
/// by pool-adjacent-violators.
std::vector<double> isotonic_projection(const std::vector<double>& y);

} // namespace mmdflow

#pragma once

#include "mmdflow/measure.hpp"

#include <string_view>

namespace mmdflow {

/// Parses a measure expression such as
///
///   gaussian(mean=5, std=1)
///   discrete(x=[-1, 0.5, 2], w=[1/3, 1/3, 1/3])
///   mixture(0.5*gaussian(-10,1) + 0.5*gaussian(10,1))
///
/// A bare weighted sum `0.5*laplace(0,1) + 0.5*uniform(2,3)` is also a
/// mixture. Numeric arguments accept + - * / parentheses, `sqrt(.)` and `pi`.
/// Errors are ConfigError with the column of the offending token.
Measure parse_measure(std::string_view text);

/// Evaluates a numeric expression with the grammar used inside measures.
double parse_number(std::string_view text);

} // namespace mmdflow

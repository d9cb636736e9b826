#pragma once

#include <string>

namespace svpg {

/// Shortest decimal text that round-trips to the same double ('.' separator,
/// locale independent). NaN/Inf print as "nan"/"inf"/"-inf".
std::string format_double(double value);

/// Fixed-point text with `digits` decimals.
std::string format_fixed(double value, int digits);

}  // namespace svpg

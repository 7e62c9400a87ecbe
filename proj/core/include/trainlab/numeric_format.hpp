#pragma once

#include <string>

namespace trainlab {

/// Number of significant digits used for every printed real number.
inline constexpr int kSignificantDigits = 9;

/// Formats a real number with kSignificantDigits significant digits ("%.9g").
std::string format_number(double value);

}  // namespace trainlab

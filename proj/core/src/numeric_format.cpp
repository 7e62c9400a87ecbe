#include "trainlab/numeric_format.hpp"

#include <cstdio>

namespace trainlab {

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, value);
  return buf;
}

}  // namespace trainlab

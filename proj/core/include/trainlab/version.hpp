#pragma once

#include <string_view>

namespace trainlab {

/// Library version, e.g. "1.0.0".
std::string_view version();

}  // namespace trainlab

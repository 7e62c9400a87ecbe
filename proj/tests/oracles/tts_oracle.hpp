#pragma once

// Time Till Score by definition: try every suffix start, earliest one whose
// points all reach the threshold.

#include <optional>
#include <vector>

#include "trainlab/curves.hpp"

namespace trainlab::oracle {

inline std::optional<double> brute_force_tts(const std::vector<curves::CurvePoint>& pts, double threshold) {
  for (std::size_t start = 0; start < pts.size(); ++start) {
    bool ok = true;
    for (std::size_t j = start; j < pts.size(); ++j) {
      if (pts[j].value < threshold) {
        ok = false;
        break;
      }
    }
    if (ok) return pts[start].wall_time;
  }
  return std::nullopt;
}

}  // namespace trainlab::oracle

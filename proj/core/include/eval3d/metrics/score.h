#pragma once

#include <string>

namespace eval3d {

// One headline number on the 0-100 scale. Evidence lives in the
// metric-specific result structs that carry a MetricScore.
struct MetricScore {
  std::string name;
  double value = 0.0;
};

}  // namespace eval3d

#pragma once

#include "eval3d/common/grid.h"

namespace eval3d {

inline constexpr Rgb8 kNoDataColor{128, 128, 128};

Rgb8 JetColor(int index);  // index clamped to [0, 255]

// round(255 * clamp((heat - lo) / (hi - lo), 0, 1)); requires lo < hi.
int HeatIndex(double heat, double lo, double hi);
Rgb8 HeatColor(double heat, double lo, double hi);

}  // namespace eval3d

#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "eval3d/camrig/camera.h"
#include "eval3d/common/grid.h"

namespace eval3d {

inline constexpr size_t kMinAlignmentPixels = 100;

struct DepthAlignment {
  Grid<float> depth;  // metric depth; 0 where invalid
  double scale = 1.0;
  double shift = 0.0;
  bool used_reciprocal = false;
};

// Least-squares scale s and shift b over pixels where mask is set and the
// reference depth is valid, minimizing sum (s * pred + b - ref)^2.
// Throws kInsufficientData below kMinAlignmentPixels or for a constant
// prediction, and kInvertedDepth ("inverted depth") when s <= 0.
DepthAlignment AlignDepth(const Grid<float>& pred, const Grid<float>& ref,
                          const Grid<uint8_t>& mask);

// Handles relative depth of either convention: disparity input is inverted
// first; an inverted fit triggers one retry on the reciprocal.
DepthAlignment AlignDepthAuto(const Grid<float>& pred, const Grid<float>& ref,
                              const Grid<uint8_t>& mask, bool is_disparity);

// Camera-space normals from metric depth by central differences of the
// unprojected points, oriented toward the camera. A pixel is valid only
// when it and its four neighbours are masked with positive depth; invalid
// pixels hold the zero vector.
Grid<Eigen::Vector3f> DepthToNormal(const Grid<float>& depth,
                                    const Intrinsics& intrinsics,
                                    const Grid<uint8_t>& mask);

}  // namespace eval3d

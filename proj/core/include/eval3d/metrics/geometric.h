#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "eval3d/common/grid.h"
#include "eval3d/metrics/score.h"

namespace eval3d {

enum class GeoPooling { kPooled, kPerViewMean };

struct GeoConfig {
  double delta_norm_deg = 23.0;
  GeoPooling pooling = GeoPooling::kPooled;
};

void ValidateGeoConfig(const GeoConfig& cfg);

// Angle in degrees between analytic and predicted normals at every pixel
// that is opaque with both normals valid; NaN elsewhere.
Grid<float> AngularDifferenceMap(const Grid<Eigen::Vector3f>& analytic,
                                 const Grid<Eigen::Vector3f>& predicted,
                                 const Grid<uint8_t>& mask);

// 1 - cos(angle), NaN preserved.
Grid<float> CosineDistanceMap(const Grid<float>& angle_deg);

struct GeoViewStats {
  int64_t inliers = 0;
  int64_t valid = 0;
};

struct GeoResult {
  MetricScore score;
  std::vector<GeoViewStats> per_view;
  std::vector<Grid<float>> angle_maps;  // degrees, NaN invalid
};

// Streaming form: views are added in rig order, maps need not be kept.
class GeoAccumulator {
 public:
  explicit GeoAccumulator(GeoConfig cfg);

  // Returns the view's angular map.
  Grid<float> AddView(const Grid<Eigen::Vector3f>& analytic,
                      const Grid<Eigen::Vector3f>& predicted,
                      const Grid<uint8_t>& mask);
  // Adds a precomputed angular map.
  void AddAngleMap(const Grid<float>& angle_deg);

  const std::vector<GeoViewStats>& per_view() const { return per_view_; }

  // Throws kInsufficientData ("no valid pixels") when no view has a valid
  // pixel.
  MetricScore Finish() const;

 private:
  GeoConfig cfg_;
  std::vector<GeoViewStats> per_view_;
};

GeoResult GeometricConsistency(std::span<const Grid<Eigen::Vector3f>> analytic,
                               std::span<const Grid<Eigen::Vector3f>> predicted,
                               std::span<const Grid<uint8_t>> masks,
                               const GeoConfig& cfg);

}  // namespace eval3d

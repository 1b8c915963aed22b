#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eval3d/common/grid.h"
#include "eval3d/metrics/score.h"

namespace eval3d {

struct StructConfig {
  std::vector<double> input_azimuths{0.0, 90.0};
  double target_interval = 90.0;
  // Elevation of the probe renders; unset means the rig elevation.
  std::optional<double> elevation_deg;
};

// Throws when the interval does not tile 360 degrees.
void ValidateStructConfig(const StructConfig& cfg);

// 0, interval, 2 * interval, ... below 360.
std::vector<double> TargetAzimuths(const StructConfig& cfg);

// Synthesizes the view at target_az from the render at source_az.
using NvsFn = std::function<RgbImage(const RgbImage& source, double source_az,
                                     double target_az)>;
// Distance in [0, 1]; tag names the (source, target) pair.
using PerceptualFn = std::function<double(
    const RgbImage& a, const RgbImage& b, const std::string& tag)>;

struct StructResult {
  MetricScore score;
  std::vector<double> input_azimuths;
  std::vector<double> target_azimuths;
  // distances[i][j]: input i, target j.
  std::vector<std::vector<double>> distances;
  std::vector<double> mean_similarity;  // per input
};

// Score from a precomputed distance matrix: 100 * max_i mean_j (1 - d_ij).
StructResult StructuralFromDistances(
    std::vector<double> input_azimuths, std::vector<double> target_azimuths,
    std::vector<std::vector<double>> distances);

// renders maps azimuth (degrees) to the asset's own render.
StructResult StructuralConsistency(const std::map<double, RgbImage>& renders,
                                   const NvsFn& nvs,
                                   const PerceptualFn& perceptual,
                                   const StructConfig& cfg);

// "<source>-><target>" with integral degrees printed without decimals.
std::string StructPairTag(double source_az, double target_az);

}  // namespace eval3d

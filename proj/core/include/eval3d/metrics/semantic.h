#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eval3d/assets/tri_mesh.h"
#include "eval3d/backends/tensor_file.h"
#include "eval3d/camrig/camera.h"
#include "eval3d/metrics/score.h"
#include "eval3d/raster/visibility.h"

namespace eval3d {

struct SemConfig {
  std::optional<double> delta_dino;  // required to score
  int min_visibility = 5;
};

void ValidateSemConfig(const SemConfig& cfg);

// Bilinear sample of a C x S x S feature map at image pixel coordinates
// (u, v) of a width x height render. Coordinates are rescaled to the map
// grid with pixel centers at +0.5; lookups clamp to the map border.
std::vector<float> SampleFeatures(const Tensor& features, double u, double v,
                                  int image_width, int image_height);

// Per-vertex samples for vertices visible in at least min_visibility views.
// samples[k] holds view-major C-vectors for vertices[k].
struct VertexFeatureSamples {
  size_t channels = 0;
  std::vector<int32_t> vertices;
  std::vector<std::vector<float>> samples;
};

// Throws kInsufficientData when no vertex qualifies.
VertexFeatureSamples FuseVertexFeatures(const TriMesh& mesh,
                                        std::span<const CameraView> views,
                                        std::span<const Tensor> features,
                                        const VisibilityTable& visibility,
                                        int min_visibility);

// Population variance per channel over the view samples, averaged across
// channels.
double MeanChannelVariance(std::span<const float> flat_samples,
                           size_t channels);

// Running per-vertex statistics for rigs too large to hold all samples.
class VertexFeatureAccumulator {
 public:
  VertexFeatureAccumulator(const TriMesh& mesh,
                           const VisibilityTable& visibility,
                           int min_visibility);

  // Throws kInsufficientData when no vertex qualifies.
  void CheckEligible() const;
  void AddView(size_t view_index, const CameraView& view,
               const Tensor& features);
  // Per mesh vertex; NaN for excluded vertices.
  std::vector<double> MeanVariances() const;

 private:
  const TriMesh& mesh_;
  const VisibilityTable& visibility_;
  std::vector<int32_t> slot_;  // vertex -> row, or -1
  size_t rows_ = 0;
  size_t channels_ = 0;
  std::vector<int> n_;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

struct SemResult {
  MetricScore score;
  std::vector<double> vertex_variance;  // per mesh vertex, NaN = no data
  size_t included = 0;
};

SemResult SemanticConsistency(const VertexFeatureSamples& samples,
                              size_t vertex_count, const SemConfig& cfg);
SemResult SemanticFromVariances(std::vector<double> vertex_variance,
                                const SemConfig& cfg);

inline constexpr size_t kMinCalibrationSamples = 100;

// Linear-interpolation percentile (rank p/100 * (n - 1) on sorted data).
double Percentile(std::vector<double> values, double percent);

// 70th percentile of pooled per-vertex variances; needs at least
// kMinCalibrationSamples finite values.
double CalibrateSemanticThreshold(std::span<const double> variances,
                                  double percent = 70.0);

}  // namespace eval3d

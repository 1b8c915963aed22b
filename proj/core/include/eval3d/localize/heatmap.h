#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "eval3d/assets/tri_mesh.h"
#include "eval3d/camrig/camera.h"
#include "eval3d/common/grid.h"
#include "eval3d/raster/visibility.h"

namespace eval3d {

// Per-vertex evidence. Vertices without data hold 0 in mean/max.
struct VertexHeat {
  std::vector<double> mean;
  std::vector<double> max;
  std::vector<uint8_t> has_data;

  size_t size() const { return mean.size(); }
};

struct HeatRange {
  double lo = 0.0;
  double hi = 1.0;
};

// (0, 4 * (1 - cos delta)) in cosine-distance units.
HeatRange DefaultGeoHeatRange(double delta_norm_deg = 23.0);
// (0, 2 * delta).
HeatRange DefaultSemHeatRange(double delta_dino);

// Bilinear sample at pixel coordinates (centers at +0.5) using only the
// non-NaN, in-bounds neighbours with positive weight, renormalized.
// nullopt when none contribute.
std::optional<double> SampleValidBilinear(const Grid<float>& map, double u,
                                          double v);

// Accumulates per-view cosine-distance samples at visible vertices.
class GeoHeatAccumulator {
 public:
  explicit GeoHeatAccumulator(size_t vertex_count);

  void AddView(const TriMesh& mesh, const CameraView& view,
               const Grid<float>& cosine_distance,
               const VisibilityTable& visibility, size_t view_index);
  VertexHeat Finish() const;

 private:
  std::vector<double> sum_;
  std::vector<double> max_;
  std::vector<int> n_;
};

// cosine_maps[k] is 1 - n_anal . n_pred for views[k], NaN where invalid.
VertexHeat BackprojectGeo(const TriMesh& mesh, std::span<const CameraView> views,
                          std::span<const Grid<float>> cosine_maps,
                          const VisibilityTable& visibility);

// Mean and max both equal the variance; NaN marks no data.
VertexHeat HeatFromVariances(std::span<const double> variances);

struct OutlierMask {
  std::vector<uint8_t> mask;
  size_t included = 0;
  size_t outliers = 0;
};

// mask[v] = variance[v] > delta; NaN variances are excluded.
OutlierMask SemanticOutliers(std::span<const double> variances, double delta);

std::vector<Rgb8> HeatColors(std::span<const double> heat,
                             std::span<const uint8_t> has_data,
                             const HeatRange& range);

// Binary PLY with per-vertex jet colors; no-data vertices are gray. Throws
// kInvalidArgument when lo >= hi or a heat value with data is not finite.
void ExportHeatmapMesh(const TriMesh& mesh, std::span<const double> heat,
                       std::span<const uint8_t> has_data,
                       const HeatRange& range,
                       const std::filesystem::path& path);

// Jet-colored image of a per-pixel map; NaN pixels are white.
RgbImage ColorizeHeatMap(const Grid<float>& map, const HeatRange& range);

}  // namespace eval3d

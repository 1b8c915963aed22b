#include "eval3d/localize/heatmap.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eval3d/assets/mesh_io.h"
#include "eval3d/common/error.h"
#include "eval3d/localize/jet_colormap.h"

namespace eval3d {
namespace {

void CheckRange(const HeatRange& range) {
  if (!(range.lo < range.hi)) {
    throw Error(ErrorCode::kInvalidArgument, "heat range requires lo < hi");
  }
}

}  // namespace

HeatRange DefaultGeoHeatRange(double delta_norm_deg) {
  return {0.0, 4.0 * (1.0 - std::cos(delta_norm_deg * std::numbers::pi / 180.0))};
}

HeatRange DefaultSemHeatRange(double delta_dino) { return {0.0, 2.0 * delta_dino}; }

std::optional<double> SampleValidBilinear(const Grid<float>& map, double u,
                                          double v) {
  const double fx = u - 0.5, fy = v - 0.5;
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(std::floor(fy));
  const double tx = fx - x0, ty = fy - y0;
  const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
  const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
  const double ws[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty,
                        tx * ty};
  double sum = 0.0, wsum = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (ws[k] <= 0.0 || !map.InBounds(xs[k], ys[k])) continue;
    const float val = map.at(xs[k], ys[k]);
    if (std::isnan(val)) continue;
    sum += ws[k] * val;
    wsum += ws[k];
  }
  if (wsum <= 0.0) return std::nullopt;
  return sum / wsum;
}

GeoHeatAccumulator::GeoHeatAccumulator(size_t vertex_count)
    : sum_(vertex_count, 0.0), max_(vertex_count, 0.0), n_(vertex_count, 0) {}

void GeoHeatAccumulator::AddView(const TriMesh& mesh, const CameraView& view,
                                 const Grid<float>& cosine_distance,
                                 const VisibilityTable& visibility,
                                 size_t view_index) {
  if (mesh.vertices.size() != sum_.size() ||
      visibility.vertex_count() != sum_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "heat accumulator size mismatch");
  }
  for (size_t v = 0; v < sum_.size(); ++v) {
    if (!visibility.visible(v, view_index)) continue;
    const Projection p = Project(view, mesh.vertices[v]);
    const std::optional<double> s =
        SampleValidBilinear(cosine_distance, p.pixel.x(), p.pixel.y());
    if (!s) continue;
    sum_[v] += *s;
    max_[v] = n_[v] ? std::max(max_[v], *s) : *s;
    ++n_[v];
  }
}

VertexHeat GeoHeatAccumulator::Finish() const {
  VertexHeat heat;
  heat.mean.assign(sum_.size(), 0.0);
  heat.max.assign(sum_.size(), 0.0);
  heat.has_data.assign(sum_.size(), 0);
  for (size_t v = 0; v < sum_.size(); ++v) {
    if (n_[v] == 0) continue;
    heat.mean[v] = sum_[v] / n_[v];
    heat.max[v] = max_[v];
    heat.has_data[v] = 1;
  }
  return heat;
}

VertexHeat BackprojectGeo(const TriMesh& mesh, std::span<const CameraView> views,
                          std::span<const Grid<float>> cosine_maps,
                          const VisibilityTable& visibility) {
  if (views.size() != cosine_maps.size() ||
      visibility.view_count() != views.size()) {
    throw Error(ErrorCode::kInvalidArgument, "back-projection inputs disagree");
  }
  GeoHeatAccumulator acc(mesh.vertices.size());
  for (size_t k = 0; k < views.size(); ++k) {
    acc.AddView(mesh, views[k], cosine_maps[k], visibility, k);
  }
  return acc.Finish();
}

VertexHeat HeatFromVariances(std::span<const double> variances) {
  VertexHeat heat;
  for (double v : variances) {
    const bool ok = !std::isnan(v);
    heat.mean.push_back(ok ? v : 0.0);
    heat.max.push_back(ok ? v : 0.0);
    heat.has_data.push_back(ok);
  }
  return heat;
}

OutlierMask SemanticOutliers(std::span<const double> variances, double delta) {
  OutlierMask out;
  out.mask.assign(variances.size(), 0);
  for (size_t v = 0; v < variances.size(); ++v) {
    if (std::isnan(variances[v])) continue;
    ++out.included;
    if (variances[v] > delta) {
      out.mask[v] = 1;
      ++out.outliers;
    }
  }
  return out;
}

std::vector<Rgb8> HeatColors(std::span<const double> heat,
                             std::span<const uint8_t> has_data,
                             const HeatRange& range) {
  CheckRange(range);
  if (heat.size() != has_data.size()) {
    throw Error(ErrorCode::kInvalidArgument, "heat and flags differ in length");
  }
  std::vector<Rgb8> colors(heat.size(), kNoDataColor);
  for (size_t v = 0; v < heat.size(); ++v) {
    if (!has_data[v]) continue;
    if (!std::isfinite(heat[v])) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite heat value");
    }
    colors[v] = HeatColor(heat[v], range.lo, range.hi);
  }
  return colors;
}

void ExportHeatmapMesh(const TriMesh& mesh, std::span<const double> heat,
                       std::span<const uint8_t> has_data,
                       const HeatRange& range,
                       const std::filesystem::path& path) {
  if (heat.size() != mesh.vertices.size()) {
    throw Error(ErrorCode::kInvalidArgument, "heat length != vertex count");
  }
  const std::vector<Rgb8> colors = HeatColors(heat, has_data, range);
  WritePly(path, mesh, &colors);
}

RgbImage ColorizeHeatMap(const Grid<float>& map, const HeatRange& range) {
  CheckRange(range);
  RgbImage out(map.width(), map.height(), Rgb8{255, 255, 255});
  for (size_t i = 0; i < map.size(); ++i) {
    const float v = map.data()[i];
    if (!std::isnan(v)) out.data()[i] = HeatColor(v, range.lo, range.hi);
  }
  return out;
}

}  // namespace eval3d

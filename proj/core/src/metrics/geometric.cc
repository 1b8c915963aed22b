#include "eval3d/metrics/geometric.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "eval3d/common/error.h"

namespace eval3d {
namespace {

constexpr float kNaN = std::numeric_limits<float>::quiet_NaN();

bool NonZero(const Eigen::Vector3f& n) { return n.squaredNorm() > 0.0f; }

}  // namespace

void ValidateGeoConfig(const GeoConfig& cfg) {
  if (!(cfg.delta_norm_deg > 0.0 && cfg.delta_norm_deg < 90.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "delta_norm must lie in (0, 90) degrees");
  }
}

Grid<float> AngularDifferenceMap(const Grid<Eigen::Vector3f>& analytic,
                                 const Grid<Eigen::Vector3f>& predicted,
                                 const Grid<uint8_t>& mask) {
  const int w = analytic.width(), h = analytic.height();
  if (predicted.width() != w || predicted.height() != h ||
      mask.width() != w || mask.height() != h) {
    throw Error(ErrorCode::kInvalidArgument, "normal map shapes disagree");
  }
  Grid<float> out(w, h, kNaN);
  for (size_t i = 0; i < out.size(); ++i) {
    const Eigen::Vector3f& a = analytic.data()[i];
    const Eigen::Vector3f& p = predicted.data()[i];
    if (!mask.data()[i] || !NonZero(a) || !NonZero(p)) continue;
    const double c = std::clamp(
        a.cast<double>().normalized().dot(p.cast<double>().normalized()), -1.0,
        1.0);
    out.data()[i] = static_cast<float>(std::acos(c) * 180.0 / std::numbers::pi);
  }
  return out;
}

Grid<float> CosineDistanceMap(const Grid<float>& angle_deg) {
  Grid<float> out(angle_deg.width(), angle_deg.height(), kNaN);
  for (size_t i = 0; i < out.size(); ++i) {
    const float a = angle_deg.data()[i];
    if (std::isnan(a)) continue;
    out.data()[i] =
        static_cast<float>(1.0 - std::cos(a * std::numbers::pi / 180.0));
  }
  return out;
}

GeoAccumulator::GeoAccumulator(GeoConfig cfg) : cfg_(cfg) {
  ValidateGeoConfig(cfg_);
}

Grid<float> GeoAccumulator::AddView(const Grid<Eigen::Vector3f>& analytic,
                                    const Grid<Eigen::Vector3f>& predicted,
                                    const Grid<uint8_t>& mask) {
  Grid<float> angles = AngularDifferenceMap(analytic, predicted, mask);
  AddAngleMap(angles);
  return angles;
}

void GeoAccumulator::AddAngleMap(const Grid<float>& angle_deg) {
  GeoViewStats s;
  for (float a : angle_deg.pixels()) {
    if (std::isnan(a)) continue;
    ++s.valid;
    if (a < cfg_.delta_norm_deg) ++s.inliers;
  }
  per_view_.push_back(s);
}

MetricScore GeoAccumulator::Finish() const {
  int64_t inliers = 0, valid = 0;
  double view_sum = 0.0;
  int views_with_data = 0;
  for (const GeoViewStats& s : per_view_) {
    inliers += s.inliers;
    valid += s.valid;
    if (s.valid > 0) {
      view_sum += static_cast<double>(s.inliers) / s.valid;
      ++views_with_data;
    }
  }
  if (valid == 0) throw Error(ErrorCode::kInsufficientData, "no valid pixels");
  MetricScore score{"geo", 0.0};
  score.value = cfg_.pooling == GeoPooling::kPooled
                    ? 100.0 * static_cast<double>(inliers) / valid
                    : 100.0 * view_sum / views_with_data;
  return score;
}

GeoResult GeometricConsistency(std::span<const Grid<Eigen::Vector3f>> analytic,
                               std::span<const Grid<Eigen::Vector3f>> predicted,
                               std::span<const Grid<uint8_t>> masks,
                               const GeoConfig& cfg) {
  if (analytic.size() != predicted.size() || analytic.size() != masks.size()) {
    throw Error(ErrorCode::kInvalidArgument, "per-view input counts disagree");
  }
  GeoAccumulator acc(cfg);
  GeoResult result;
  for (size_t v = 0; v < analytic.size(); ++v) {
    result.angle_maps.push_back(acc.AddView(analytic[v], predicted[v], masks[v]));
  }
  result.per_view = acc.per_view();
  result.score = acc.Finish();
  return result;
}

}  // namespace eval3d

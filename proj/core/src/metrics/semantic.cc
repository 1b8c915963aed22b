#include "eval3d/metrics/semantic.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eval3d/common/error.h"

namespace eval3d {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void CheckFeatureShape(const Tensor& t) {
  const auto& d = t.dims();
  if (t.dtype() != DType::kF32 || d.size() != 3 || d[0] == 0 || d[1] == 0 ||
      d[1] != d[2]) {
    throw Error(ErrorCode::kShapeContract,
                "feature map must be C×S×S f32, got " + DescribeDims(d));
  }
}

}  // namespace

void ValidateSemConfig(const SemConfig& cfg) {
  if (cfg.delta_dino && !(*cfg.delta_dino > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "delta_dino must be positive");
  }
  if (cfg.min_visibility < 1) {
    throw Error(ErrorCode::kInvalidArgument, "min_visibility must be >= 1");
  }
}

std::vector<float> SampleFeatures(const Tensor& features, double u, double v,
                                  int image_width, int image_height) {
  CheckFeatureShape(features);
  const size_t c = features.dims()[0];
  const int s = static_cast<int>(features.dims()[1]);
  const double fx = u * s / image_width - 0.5;
  const double fy = v * s / image_height - 0.5;
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(std::floor(fy));
  const double tx = fx - x0, ty = fy - y0;
  auto clampi = [s](int i) { return std::clamp(i, 0, s - 1); };
  const int xa = clampi(x0), xb = clampi(x0 + 1);
  const int ya = clampi(y0), yb = clampi(y0 + 1);
  const auto data = features.f32();
  const size_t plane = static_cast<size_t>(s) * s;
  std::vector<float> out(c);
  for (size_t ch = 0; ch < c; ++ch) {
    const float* p = data.data() + ch * plane;
    auto at = [&](int x, int y) { return double(p[size_t(y) * s + x]); };
    const double top = (1 - tx) * at(xa, ya) + tx * at(xb, ya);
    const double bot = (1 - tx) * at(xa, yb) + tx * at(xb, yb);
    out[ch] = static_cast<float>((1 - ty) * top + ty * bot);
  }
  return out;
}

VertexFeatureSamples FuseVertexFeatures(const TriMesh& mesh,
                                        std::span<const CameraView> views,
                                        std::span<const Tensor> features,
                                        const VisibilityTable& visibility,
                                        int min_visibility) {
  if (views.size() != features.size() ||
      visibility.view_count() != views.size() ||
      visibility.vertex_count() != mesh.vertices.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "feature fusion inputs disagree in size");
  }
  VertexFeatureSamples out;
  if (!features.empty()) {
    CheckFeatureShape(features[0]);
    out.channels = features[0].dims()[0];
  }
  for (const Tensor& t : features) {
    CheckFeatureShape(t);
    if (t.dims() != features[0].dims()) {
      throw Error(ErrorCode::kShapeContract, "feature maps differ in shape");
    }
  }
  for (size_t vi = 0; vi < mesh.vertices.size(); ++vi) {
    if (visibility.count(vi) < min_visibility) continue;
    std::vector<float> flat;
    for (size_t k = 0; k < views.size(); ++k) {
      if (!visibility.visible(vi, k)) continue;
      const Projection p = Project(views[k], mesh.vertices[vi]);
      const std::vector<float> s = SampleFeatures(
          features[k], p.pixel.x(), p.pixel.y(), views[k].width, views[k].height);
      flat.insert(flat.end(), s.begin(), s.end());
    }
    out.vertices.push_back(static_cast<int32_t>(vi));
    out.samples.push_back(std::move(flat));
  }
  if (out.vertices.empty()) {
    throw Error(ErrorCode::kInsufficientData,
                "no vertex visible in at least " +
                    std::to_string(min_visibility) + " views");
  }
  return out;
}

double MeanChannelVariance(std::span<const float> flat, size_t channels) {
  if (channels == 0 || flat.empty() || flat.size() % channels != 0) {
    throw Error(ErrorCode::kInvalidArgument, "bad feature sample layout");
  }
  const size_t n = flat.size() / channels;
  double total = 0.0;
  for (size_t c = 0; c < channels; ++c) {
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) mean += flat[i * channels + c];
    mean /= n;
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double d = flat[i * channels + c] - mean;
      ss += d * d;
    }
    total += ss / n;
  }
  return total / channels;
}

VertexFeatureAccumulator::VertexFeatureAccumulator(
    const TriMesh& mesh, const VisibilityTable& visibility, int min_visibility)
    : mesh_(mesh), visibility_(visibility),
      slot_(mesh.vertices.size(), -1) {
  if (visibility.vertex_count() != mesh.vertices.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "visibility table does not match mesh");
  }
  for (size_t v = 0; v < slot_.size(); ++v) {
    if (visibility.count(v) >= min_visibility) {
      slot_[v] = static_cast<int32_t>(rows_++);
    }
  }
  n_.assign(rows_, 0);
}

void VertexFeatureAccumulator::CheckEligible() const {
  if (rows_ == 0) {
    throw Error(ErrorCode::kInsufficientData,
                "no vertex meets the minimum visibility");
  }
}

void VertexFeatureAccumulator::AddView(size_t view_index,
                                       const CameraView& view,
                                       const Tensor& features) {
  CheckFeatureShape(features);
  const size_t c = features.dims()[0];
  if (channels_ == 0) {
    channels_ = c;
    mean_.assign(rows_ * c, 0.0);
    m2_.assign(rows_ * c, 0.0);
  } else if (c != channels_) {
    throw Error(ErrorCode::kShapeContract, "feature channel count changed");
  }
  for (size_t v = 0; v < slot_.size(); ++v) {
    if (slot_[v] < 0 || !visibility_.visible(v, view_index)) continue;
    const size_t row = slot_[v];
    const Projection p = Project(view, mesh_.vertices[v]);
    const std::vector<float> s =
        SampleFeatures(features, p.pixel.x(), p.pixel.y(), view.width,
                       view.height);
    const int n = ++n_[row];
    for (size_t ch = 0; ch < c; ++ch) {
      double& mean = mean_[row * c + ch];
      const double delta = s[ch] - mean;
      mean += delta / n;
      m2_[row * c + ch] += delta * (s[ch] - mean);
    }
  }
}

std::vector<double> VertexFeatureAccumulator::MeanVariances() const {
  std::vector<double> out(slot_.size(), kNaN);
  for (size_t v = 0; v < slot_.size(); ++v) {
    if (slot_[v] < 0) continue;
    const size_t row = slot_[v];
    if (n_[row] == 0 || channels_ == 0) continue;
    double total = 0.0;
    for (size_t ch = 0; ch < channels_; ++ch) {
      total += m2_[row * channels_ + ch] / n_[row];
    }
    out[v] = total / channels_;
  }
  return out;
}

SemResult SemanticConsistency(const VertexFeatureSamples& samples,
                              size_t vertex_count, const SemConfig& cfg) {
  std::vector<double> var(vertex_count, kNaN);
  for (size_t k = 0; k < samples.vertices.size(); ++k) {
    const int32_t v = samples.vertices[k];
    if (v < 0 || static_cast<size_t>(v) >= vertex_count) {
      throw Error(ErrorCode::kInvalidArgument, "sample vertex out of range");
    }
    var[v] = MeanChannelVariance(samples.samples[k], samples.channels);
  }
  return SemanticFromVariances(std::move(var), cfg);
}

SemResult SemanticFromVariances(std::vector<double> vertex_variance,
                                const SemConfig& cfg) {
  ValidateSemConfig(cfg);
  if (!cfg.delta_dino) {
    throw Error(ErrorCode::kInvalidArgument, "delta_dino is not configured");
  }
  SemResult r;
  size_t below = 0;
  for (double v : vertex_variance) {
    if (std::isnan(v)) continue;
    ++r.included;
    if (v < *cfg.delta_dino) ++below;
  }
  if (r.included == 0) {
    throw Error(ErrorCode::kInsufficientData, "no included vertices");
  }
  r.score = {"sem", 100.0 * static_cast<double>(below) / r.included};
  r.vertex_variance = std::move(vertex_variance);
  return r;
}

double Percentile(std::vector<double> values, double percent) {
  if (values.empty()) {
    throw Error(ErrorCode::kInsufficientData, "percentile of empty set");
  }
  if (!(percent >= 0.0 && percent <= 100.0)) {
    throw Error(ErrorCode::kInvalidArgument, "percentile outside [0, 100]");
  }
  std::sort(values.begin(), values.end());
  const double rank = percent / 100.0 * (values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(rank));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  const double t = rank - lo;
  return values[lo] + t * (values[hi] - values[lo]);
}

double CalibrateSemanticThreshold(std::span<const double> variances,
                                  double percent) {
  std::vector<double> finite;
  for (double v : variances) {
    if (std::isfinite(v)) finite.push_back(v);
  }
  if (finite.size() < kMinCalibrationSamples) {
    throw Error(ErrorCode::kInsufficientData,
                "calibration needs >= 100 variance samples, got " +
                    std::to_string(finite.size()));
  }
  return Percentile(std::move(finite), percent);
}

}  // namespace eval3d

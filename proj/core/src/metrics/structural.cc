#include "eval3d/metrics/structural.h"

#include <cmath>
#include <sstream>

#include "eval3d/common/error.h"

namespace eval3d {
namespace {

std::string FormatDeg(double d) {
  std::ostringstream os;
  if (d == std::round(d)) {
    os << static_cast<long long>(d);
  } else {
    os << d;
  }
  return os.str();
}

}  // namespace

void ValidateStructConfig(const StructConfig& cfg) {
  if (cfg.input_azimuths.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no structural input azimuths");
  }
  const double n = 360.0 / cfg.target_interval;
  if (!(cfg.target_interval > 0.0) || std::abs(n - std::round(n)) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "target interval must divide 360 degrees");
  }
}

std::vector<double> TargetAzimuths(const StructConfig& cfg) {
  ValidateStructConfig(cfg);
  const int n = static_cast<int>(std::lround(360.0 / cfg.target_interval));
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(i * cfg.target_interval);
  return out;
}

std::string StructPairTag(double source_az, double target_az) {
  return FormatDeg(source_az) + "->" + FormatDeg(target_az);
}

StructResult StructuralFromDistances(
    std::vector<double> input_azimuths, std::vector<double> target_azimuths,
    std::vector<std::vector<double>> distances) {
  if (input_azimuths.empty() || target_azimuths.empty() ||
      distances.size() != input_azimuths.size()) {
    throw Error(ErrorCode::kInvalidArgument, "structural distance matrix shape");
  }
  StructResult r;
  double best = 0.0;
  for (const auto& row : distances) {
    if (row.size() != target_azimuths.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "structural distance matrix shape");
    }
    double sum = 0.0;
    for (double d : row) {
      if (!(d >= 0.0 && d <= 1.0)) {
        throw Error(ErrorCode::kShapeContract,
                    "perceptual distance outside [0, 1]");
      }
      sum += 1.0 - d;
    }
    const double mean = sum / row.size();
    r.mean_similarity.push_back(mean);
    best = std::max(best, mean);
  }
  r.score = {"struct", 100.0 * best};
  r.input_azimuths = std::move(input_azimuths);
  r.target_azimuths = std::move(target_azimuths);
  r.distances = std::move(distances);
  return r;
}

StructResult StructuralConsistency(const std::map<double, RgbImage>& renders,
                                   const NvsFn& nvs,
                                   const PerceptualFn& perceptual,
                                   const StructConfig& cfg) {
  const std::vector<double> targets = TargetAzimuths(cfg);
  auto render_at = [&](double az) -> const RgbImage& {
    auto it = renders.find(az);
    if (it == renders.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "no render at azimuth " + FormatDeg(az));
    }
    return it->second;
  };
  std::vector<std::vector<double>> distances;
  for (double a : cfg.input_azimuths) {
    const RgbImage& source = render_at(a);
    std::vector<double> row;
    for (double t : targets) {
      const RgbImage synth = nvs(source, a, t);
      row.push_back(perceptual(synth, render_at(t), StructPairTag(a, t)));
    }
    distances.push_back(std::move(row));
  }
  return StructuralFromDistances(cfg.input_azimuths, targets,
                                 std::move(distances));
}

}  // namespace eval3d

#include "eval3d/metrics/depth_normal.h"

#include <cmath>

#include "eval3d/common/error.h"

namespace eval3d {
namespace {

void CheckSameShape(const Grid<float>& a, const Grid<float>& b,
                    const Grid<uint8_t>& mask) {
  if (a.width() != b.width() || a.height() != b.height() ||
      a.width() != mask.width() || a.height() != mask.height()) {
    throw Error(ErrorCode::kInvalidArgument, "depth alignment: shape mismatch");
  }
}

Grid<float> Reciprocal(const Grid<float>& g) {
  Grid<float> out(g.width(), g.height(), 0.0f);
  for (size_t i = 0; i < g.size(); ++i) {
    const float v = g.data()[i];
    out.data()[i] = (v != 0.0f && std::isfinite(v)) ? 1.0f / v : 0.0f;
  }
  return out;
}

}  // namespace

DepthAlignment AlignDepth(const Grid<float>& pred, const Grid<float>& ref,
                          const Grid<uint8_t>& mask) {
  CheckSameShape(pred, ref, mask);
  auto usable = [&](size_t i) {
    return mask.data()[i] && ref.data()[i] > 0.0f && std::isfinite(pred.data()[i]);
  };
  size_t n = 0;
  double mp = 0.0, mr = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    if (!usable(i)) continue;
    ++n;
    mp += pred.data()[i];
    mr += ref.data()[i];
  }
  if (n < kMinAlignmentPixels) {
    throw Error(ErrorCode::kInsufficientData,
                "depth alignment needs >= 100 valid pixels, got " +
                    std::to_string(n));
  }
  mp /= n;
  mr /= n;
  double spp = 0.0, spr = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    if (!usable(i)) continue;
    const double dp = pred.data()[i] - mp;
    spp += dp * dp;
    spr += dp * (ref.data()[i] - mr);
  }
  if (spp <= 0.0) {
    throw Error(ErrorCode::kInsufficientData, "constant depth prediction");
  }
  DepthAlignment out;
  out.scale = spr / spp;
  out.shift = mr - out.scale * mp;
  if (out.scale <= 0.0) throw Error(ErrorCode::kInvertedDepth, "inverted depth");
  out.depth = Grid<float>(pred.width(), pred.height(), 0.0f);
  for (size_t i = 0; i < pred.size(); ++i) {
    if (!mask.data()[i] || !std::isfinite(pred.data()[i])) continue;
    const double d = out.scale * pred.data()[i] + out.shift;
    if (d > 0.0) out.depth.data()[i] = static_cast<float>(d);
  }
  return out;
}

DepthAlignment AlignDepthAuto(const Grid<float>& pred, const Grid<float>& ref,
                              const Grid<uint8_t>& mask, bool is_disparity) {
  const Grid<float> first = is_disparity ? Reciprocal(pred) : pred;
  try {
    DepthAlignment a = AlignDepth(first, ref, mask);
    a.used_reciprocal = is_disparity;
    return a;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInvertedDepth) throw;
  }
  DepthAlignment a = AlignDepth(Reciprocal(first), ref, mask);
  a.used_reciprocal = !is_disparity;
  return a;
}

Grid<Eigen::Vector3f> DepthToNormal(const Grid<float>& depth,
                                    const Intrinsics& k,
                                    const Grid<uint8_t>& mask) {
  const int w = depth.width(), h = depth.height();
  Grid<Eigen::Vector3f> normals(w, h, Eigen::Vector3f::Zero());
  auto valid = [&](int x, int y) {
    return depth.InBounds(x, y) && mask.at(x, y) && depth.at(x, y) > 0.0f;
  };
  auto point = [&](int x, int y) {
    return UnprojectToCamera(k, {x + 0.5, y + 0.5}, depth.at(x, y));
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!valid(x, y) || !valid(x - 1, y) || !valid(x + 1, y) ||
          !valid(x, y - 1) || !valid(x, y + 1)) {
        continue;
      }
      const Eigen::Vector3d du = point(x + 1, y) - point(x - 1, y);
      const Eigen::Vector3d dv = point(x, y + 1) - point(x, y - 1);
      Eigen::Vector3d n = du.cross(dv);
      const double len = n.norm();
      if (!(len > 0.0)) continue;
      n /= len;
      if (n.dot(point(x, y)) > 0.0) n = -n;
      normals.at(x, y) = n.cast<float>();
    }
  }
  return normals;
}

}  // namespace eval3d

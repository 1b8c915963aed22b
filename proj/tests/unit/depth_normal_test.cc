#include <gtest/gtest.h>

#include <cmath>

#include "eval3d/common/error.h"
#include "eval3d/metrics/depth_normal.h"
#include "eval3d/raster/rasterizer.h"
#include "test_support.h"

namespace eval3d {
namespace {

using testing::kPi;

struct SphereRender {
  CameraView view;
  RenderBuffers buffers;
};

SphereRender RenderSphere(int res = 128) {
  SphereRender s;
  s.view = MakeView(0, 20, 15, testing::SmallRig(1, res));
  s.buffers = Rasterize(testing::UnitSphere(4), s.view);
  return s;
}

Grid<float> Map(const Grid<float>& in, const Grid<uint8_t>& mask,
                const std::function<float(float)>& fn) {
  Grid<float> out(in.width(), in.height(), 0.0f);
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < in.width(); ++x)
      if (mask.at(x, y)) out.at(x, y) = fn(in.at(x, y));
  return out;
}

TEST(AlignDepthTest, RecoversAffineMap) {
  const SphereRender s = RenderSphere();
  const auto& ref = s.buffers.depth;
  const auto& mask = s.buffers.opacity;
  const DepthAlignment a =
      AlignDepth(Map(ref, mask, [](float d) { return 2 * d + 3; }), ref, mask);
  EXPECT_NEAR(a.scale, 0.5, 1e-6);
  EXPECT_NEAR(a.shift, -1.5, 1e-5);
  for (int y = 0; y < ref.height(); ++y) {
    for (int x = 0; x < ref.width(); ++x) {
      if (mask.at(x, y)) EXPECT_NEAR(a.depth.at(x, y), ref.at(x, y), 1e-5);
      else EXPECT_EQ(a.depth.at(x, y), 0.0f);
    }
  }
}

TEST(AlignDepthTest, IdentityFit) {
  const SphereRender s = RenderSphere();
  const DepthAlignment a = AlignDepth(s.buffers.depth, s.buffers.depth, s.buffers.opacity);
  EXPECT_NEAR(a.scale, 1.0, 1e-9);
  EXPECT_NEAR(a.shift, 0.0, 1e-8);
  EXPECT_FALSE(a.used_reciprocal);
}

TEST(AlignDepthTest, NegatedDepthIsInverted) {
  const SphereRender s = RenderSphere();
  const auto& mask = s.buffers.opacity;
  try {
    AlignDepth(Map(s.buffers.depth, mask, [](float d) { return -d; }),
               s.buffers.depth, mask);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvertedDepth);
    EXPECT_STREQ(e.what(), "inverted depth");
  }
}

TEST(AlignDepthTest, ReciprocalRetryRecoversDisparityLikeInput) {
  const SphereRender s = RenderSphere();
  const auto& ref = s.buffers.depth;
  const auto& mask = s.buffers.opacity;
  // 1 / pred = 2 * ref + 1 is affine in ref; pred itself decreases with depth.
  const Grid<float> pred = Map(ref, mask, [](float d) { return 1.0f / (2 * d + 1); });
  const DepthAlignment a = AlignDepthAuto(pred, ref, mask, /*is_disparity=*/false);
  EXPECT_TRUE(a.used_reciprocal);
  EXPECT_NEAR(a.scale, 0.5, 1e-4);
  EXPECT_NEAR(a.shift, -0.5, 1e-4);
  const DepthAlignment b = AlignDepthAuto(pred, ref, mask, /*is_disparity=*/true);
  EXPECT_TRUE(b.used_reciprocal);
  EXPECT_NEAR(b.scale, 0.5, 1e-4);
}

TEST(AlignDepthTest, TooFewPixelsOrConstantPrediction) {
  const SphereRender s = RenderSphere();
  Grid<uint8_t> small(s.buffers.opacity.width(), s.buffers.opacity.height(), 0);
  int kept = 0;
  for (int y = 0; y < small.height() && kept < 99; ++y)
    for (int x = 0; x < small.width() && kept < 99; ++x)
      if (s.buffers.opacity.at(x, y)) small.at(x, y) = 1, ++kept;
  try {
    AlignDepth(s.buffers.depth, s.buffers.depth, small);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientData);
  }
  const Grid<float> flat =
      Map(s.buffers.depth, s.buffers.opacity, [](float) { return 1.0f; });
  EXPECT_THROW(AlignDepth(flat, s.buffers.depth, s.buffers.opacity), Error);
}

Intrinsics TestIntrinsics(int size) {
  return {static_cast<double>(size), static_cast<double>(size), size / 2.0,
          size / 2.0};
}

TEST(DepthToNormalTest, FrontoParallelPlaneFacesCamera) {
  const int n = 32;
  Grid<float> depth(n, n, 3.0f);
  Grid<uint8_t> mask(n, n, 1);
  const auto normals = DepthToNormal(depth, TestIntrinsics(n), mask);
  for (int y = 1; y < n - 1; ++y) {
    for (int x = 1; x < n - 1; ++x) {
      EXPECT_LT((normals.at(x, y) - Eigen::Vector3f(0, 0, 1)).norm(), 1e-4f);
    }
  }
  // Border pixels lack a neighbour.
  EXPECT_EQ(normals.at(0, 5), Eigen::Vector3f::Zero());
  EXPECT_EQ(normals.at(5, n - 1), Eigen::Vector3f::Zero());
}

TEST(DepthToNormalTest, TiltedPlaneMatchesAnalyticNormal) {
  const int n = 64;
  const Intrinsics k = TestIntrinsics(n);
  Grid<float> depth(n, n);
  Grid<uint8_t> mask(n, n, 1);
  // Plane depth = 3 + X in camera space, whose viewer-facing unit normal is
  // (1, 0, 1) / sqrt(2). Along the ray (a, b, -1) * d this gives d = 3/(1-a).
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double a = (x + 0.5 - k.cx) / k.fx;
      depth.at(x, y) = static_cast<float>(3.0 / (1.0 - a));
    }
  }
  const auto normals = DepthToNormal(depth, k, mask);
  const Eigen::Vector3d expected = Eigen::Vector3d(1, 0, 1).normalized();
  for (int y = 1; y < n - 1; ++y) {
    for (int x = 1; x < n - 1; ++x) {
      const double cosang = normals.at(x, y).cast<double>().dot(expected);
      EXPECT_LT(std::acos(std::min(1.0, cosang)) * 180 / kPi, 1.0);
    }
  }
}

TEST(DepthToNormalTest, MaskHoleInvalidatesNeighbours) {
  const int n = 16;
  Grid<float> depth(n, n, 2.0f);
  Grid<uint8_t> mask(n, n, 1);
  mask.at(8, 8) = 0;
  const auto normals = DepthToNormal(depth, TestIntrinsics(n), mask);
  EXPECT_EQ(normals.at(8, 8), Eigen::Vector3f::Zero());
  EXPECT_EQ(normals.at(7, 8), Eigen::Vector3f::Zero());
  EXPECT_EQ(normals.at(8, 9), Eigen::Vector3f::Zero());
  EXPECT_NEAR(normals.at(6, 8).norm(), 1.0f, 1e-5f);
  EXPECT_NEAR(normals.at(7, 7).norm(), 1.0f, 1e-5f);
}

TEST(DepthToNormalTest, SphereDepthNormalsMatchRasterizedNormals) {
  const SphereRender s = RenderSphere(256);
  const auto normals =
      DepthToNormal(s.buffers.depth, s.view.intrinsics, s.buffers.opacity);
  int valid = 0, close = 0;
  for (int y = 0; y < normals.height(); ++y) {
    for (int x = 0; x < normals.width(); ++x) {
      if (normals.at(x, y).squaredNorm() == 0) continue;
      ++valid;
      const double c = normals.at(x, y).cast<double>().dot(
          s.buffers.normal.at(x, y).cast<double>());
      close += std::acos(std::clamp(c, -1.0, 1.0)) * 180 / kPi < 5.0;
    }
  }
  ASSERT_GT(valid, 5000);
  EXPECT_GE(static_cast<double>(close) / valid, 0.98);
}

}  // namespace
}  // namespace eval3d

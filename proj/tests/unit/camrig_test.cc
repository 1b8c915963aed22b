#include <gtest/gtest.h>

#include <cmath>

#include "eval3d/camrig/camera.h"
#include "eval3d/common/error.h"
#include "test_support.h"

namespace eval3d {
namespace {

using testing::kPi;

TEST(RigTest, DefaultsMatchProtocolRig) {
  const RigSpec spec;
  EXPECT_EQ(spec.n_views, 120);
  EXPECT_DOUBLE_EQ(spec.elevation_deg, 15.0);
  EXPECT_DOUBLE_EQ(spec.distance, 4.2);
  EXPECT_DOUBLE_EQ(spec.vfov_deg, 50.0);
  EXPECT_EQ(spec.resolution, 512);
}

TEST(RigTest, UniformAzimuthsAndSphericalCenters) {
  const RigSpec spec;
  const auto rig = BuildRig(spec);
  ASSERT_EQ(rig.size(), 120u);
  for (size_t i = 0; i < rig.size(); ++i) {
    const double az = i * 3.0;
    EXPECT_NEAR(rig[i].azimuth_deg, az, 1e-12);
    EXPECT_EQ(rig[i].id, static_cast<int>(i));
    const double a = az * kPi / 180, e = 15 * kPi / 180;
    const Eigen::Vector3d expected =
        4.2 * Eigen::Vector3d(std::cos(e) * std::sin(a), std::sin(e),
                              std::cos(e) * std::cos(a));
    EXPECT_LT((rig[i].Center() - expected).norm(), 1e-12);
  }
}

TEST(RigTest, OriginProjectsToImageCenter) {
  for (const auto& view : BuildRig(testing::SmallRig(8, 512))) {
    const Projection p = Project(view, Eigen::Vector3d::Zero());
    EXPECT_TRUE(p.in_frustum);
    EXPECT_NEAR(p.pixel.x(), 256.0, 1e-9);
    EXPECT_NEAR(p.pixel.y(), 256.0, 1e-9);
    EXPECT_NEAR(p.depth, 4.2, 1e-12);
  }
}

TEST(RigTest, FocalLengthFromVerticalFov) {
  const CameraView v = MakeView(0, 0, 15, testing::SmallRig(1, 512));
  const double f = 256.0 / std::tan(25.0 * kPi / 180.0);
  EXPECT_NEAR(v.intrinsics.fx, f, 1e-9);
  EXPECT_NEAR(v.intrinsics.fy, f, 1e-9);
  EXPECT_DOUBLE_EQ(v.intrinsics.cx, 256.0);
  EXPECT_DOUBLE_EQ(v.intrinsics.cy, 256.0);
}

TEST(RigTest, UpIsUpAndRightIsRight) {
  const CameraView v = MakeView(0, 0, 0, testing::SmallRig(1, 512));
  const Projection up = Project(v, {0, 0.5, 0});
  const Projection right = Project(v, {0.5, 0, 0});
  EXPECT_LT(up.pixel.y(), 256.0);
  EXPECT_GT(right.pixel.x(), 256.0);
}

TEST(RigTest, DegenerateUpVector) {
  RigSpec spec = testing::SmallRig(4, 64);
  spec.elevation_deg = 90;
  try {
    BuildRig(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    EXPECT_STREQ(e.what(), "degenerate up vector");
  }
}

TEST(RigTest, InvalidSpecsRejected) {
  RigSpec spec = testing::SmallRig(0, 64);
  EXPECT_THROW(BuildRig(spec), Error);
  spec = testing::SmallRig(4, 0);
  EXPECT_THROW(BuildRig(spec), Error);
}

TEST(ProjectionTest, UnprojectInvertsProject) {
  const auto rig = BuildRig(testing::SmallRig(7, 300));
  const Eigen::Vector3d p(0.3, -0.4, 0.2);
  for (const auto& view : rig) {
    const Projection pr = Project(view, p);
    ASSERT_TRUE(pr.in_frustum);
    EXPECT_LT((Unproject(view, pr.pixel, pr.depth) - p).norm(), 1e-10);
  }
}

TEST(ProjectionTest, PointBehindCameraIsOutOfFrustum) {
  const CameraView v = MakeView(0, 0, 0, testing::SmallRig(1, 64));
  EXPECT_FALSE(Project(v, {0, 0, 10}).in_frustum);
  EXPECT_FALSE(Project(v, {100, 0, 0}).in_frustum);
}

TEST(ProjectionTest, PixelCenterOffset) {
  const CameraView v = MakeView(0, 0, 0, testing::SmallRig(1, 4));
  const Eigen::Vector3d c = UnprojectToCamera(v.intrinsics, {2.0, 2.0}, 3.0);
  EXPECT_NEAR(c.x(), 0.0, 1e-12);
  EXPECT_NEAR(c.y(), 0.0, 1e-12);
  EXPECT_NEAR(c.z(), -3.0, 1e-12);
}

TEST(RigTest, SubsampleTakesEveryKth) {
  const auto rig = BuildRig(RigSpec{});
  const auto sub = SubsampleRig(rig, 12);
  ASSERT_EQ(sub.size(), 12u);
  for (size_t i = 0; i < sub.size(); ++i) {
    EXPECT_EQ(sub[i].id, static_cast<int>(10 * i));
    EXPECT_NEAR(sub[i].azimuth_deg, 30.0 * i, 1e-12);
  }
  EXPECT_THROW(SubsampleRig(rig, 7), Error);
}

TEST(RigTest, JsonRoundTrip) {
  const auto rig = BuildRig(testing::SmallRig(5, 128));
  const auto back = RigFromJson(RigToJson(rig));
  ASSERT_EQ(back.size(), rig.size());
  for (size_t i = 0; i < rig.size(); ++i) {
    EXPECT_EQ(back[i].id, rig[i].id);
    EXPECT_EQ(back[i].width, 128);
    EXPECT_TRUE(back[i].world_to_camera.matrix().isApprox(
        rig[i].world_to_camera.matrix(), 1e-12));
    EXPECT_NEAR(back[i].intrinsics.fx, rig[i].intrinsics.fx, 1e-12);
  }
}

}  // namespace
}  // namespace eval3d

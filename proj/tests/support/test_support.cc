#include "test_support.h"

#include <Eigen/Geometry>
#include <atomic>
#include <limits>
#include <random>

#include <unistd.h>

#include "eval3d/assets/primitives.h"

namespace eval3d::testing {

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("eval3d_test_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++) + "_" + std::to_string(rd()));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

TriMesh UnitSphere(int subdivisions) {
  return PrepareMesh(MakeIcosphere(subdivisions));
}

RigSpec SmallRig(int n_views, int resolution) {
  RigSpec spec;
  spec.n_views = n_views;
  spec.resolution = resolution;
  return spec;
}

double RaySphereDepth(const CameraView& view, double u, double v,
                      double radius) {
  const double f = (view.height / 2.0) / std::tan(view.vfov_deg * kPi / 360.0);
  const Eigen::Vector3d dir_cam((u - view.width / 2.0) / f,
                                -(v - view.height / 2.0) / f, -1.0);
  const Eigen::Matrix3d r = view.world_to_camera.linear();
  const Eigen::Vector3d origin = -r.transpose() * view.world_to_camera.translation();
  const Eigen::Vector3d dir = r.transpose() * dir_cam;
  // |o + t d|^2 = radius^2
  const double a = dir.squaredNorm();
  const double b = 2.0 * origin.dot(dir);
  const double c = origin.squaredNorm() - radius * radius;
  const double disc = b * b - 4 * a * c;
  if (disc < 0) return std::numeric_limits<double>::quiet_NaN();
  return (-b - std::sqrt(disc)) / (2 * a);  // dir_cam.z = -1, so t is depth
}

Eigen::Vector3d RotatePerpendicular(const Eigen::Vector3d& n, double degrees) {
  Eigen::Vector3d helper = std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX()
                                                 : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d axis = n.cross(helper).normalized();
  return Eigen::AngleAxisd(degrees * kPi / 180.0, axis) * n;
}

std::string StubBackendPath() { return EVAL3D_STUB_BACKEND; }
std::string CliPath() { return EVAL3D_CLI; }
std::filesystem::path TestDataDir() { return EVAL3D_TEST_DATA_DIR; }

}  // namespace eval3d::testing

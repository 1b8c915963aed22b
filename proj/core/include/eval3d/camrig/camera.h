#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <vector>

#include <nlohmann/json.hpp>

namespace eval3d {

// Conventions: right-handed world with +y up. Camera space has +x right,
// +y up and looks down -z; "depth" is the positive distance along the view
// axis (-z_cam). Pixel (0,0) is the top-left corner; pixel centers sit at
// half-integer coordinates.
struct Intrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;
};

struct CameraView {
  int id = 0;
  double azimuth_deg = 0;
  double elevation_deg = 0;
  double distance = 0;
  double vfov_deg = 0;
  int width = 0;
  int height = 0;
  double near = 0.1;
  double far = 10.0;
  Eigen::Isometry3d world_to_camera = Eigen::Isometry3d::Identity();
  Intrinsics intrinsics;

  Eigen::Vector3d Center() const {
    return world_to_camera.inverse().translation();
  }
  Eigen::Matrix3d Rotation() const { return world_to_camera.linear(); }
};

struct RigSpec {
  int n_views = 120;
  double elevation_deg = 15.0;
  double distance = 4.2;
  double vfov_deg = 50.0;
  int resolution = 512;
  double near = 0.1;
  double far = 10.0;
};

struct Projection {
  Eigen::Vector2d pixel;  // (u, v)
  double depth = 0;       // camera-space depth, > 0 in front
  bool in_frustum = false;
};

// Camera at the given spherical pose looking at the world origin.
CameraView MakeView(int id, double azimuth_deg, double elevation_deg,
                    const RigSpec& spec);

// n_views cameras with azimuth_i = i * 360 / n_views. Throws
// "degenerate up vector" when the elevation makes the look-at singular.
std::vector<CameraView> BuildRig(const RigSpec& spec);

Projection Project(const CameraView& view, const Eigen::Vector3d& world);

Eigen::Vector3d Unproject(const CameraView& view, const Eigen::Vector2d& pixel,
                          double depth);

// Camera-space point for pixel + depth.
Eigen::Vector3d UnprojectToCamera(const Intrinsics& k,
                                  const Eigen::Vector2d& pixel, double depth);

// Every (size / n)-th view starting at index 0; n must divide the rig size.
std::vector<CameraView> SubsampleRig(const std::vector<CameraView>& rig,
                                     int n);

nlohmann::json ViewToJson(const CameraView& view);
CameraView ViewFromJson(const nlohmann::json& j);
nlohmann::json RigToJson(const std::vector<CameraView>& rig);
std::vector<CameraView> RigFromJson(const nlohmann::json& j);

}  // namespace eval3d

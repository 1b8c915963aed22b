#include "eval3d/camrig/camera.h"

#include <cmath>
#include <numbers>
#include <string>

#include "eval3d/common/error.h"

namespace eval3d {
namespace {

double Radians(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

CameraView MakeView(int id, double azimuth_deg, double elevation_deg,
                    const RigSpec& spec) {
  if (spec.resolution <= 0 || spec.distance <= 0.0 || spec.vfov_deg <= 0.0 ||
      spec.vfov_deg >= 180.0 || spec.near <= 0.0 || spec.far <= spec.near) {
    throw Error(ErrorCode::kInvalidArgument, "invalid rig spec");
  }
  const double az = Radians(azimuth_deg);
  const double el = Radians(elevation_deg);
  const Eigen::Vector3d center =
      spec.distance * Eigen::Vector3d(std::cos(el) * std::sin(az),
                                      std::sin(el),
                                      std::cos(el) * std::cos(az));
  const Eigen::Vector3d up(0.0, 1.0, 0.0);
  // Camera +z axis points from the origin toward the camera.
  const Eigen::Vector3d back = center.normalized();
  const Eigen::Vector3d right_raw = up.cross(back);
  if (right_raw.norm() < 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "degenerate up vector");
  }
  const Eigen::Vector3d right = right_raw.normalized();
  const Eigen::Vector3d cam_up = back.cross(right);

  Eigen::Matrix3d rot;
  rot.row(0) = right;
  rot.row(1) = cam_up;
  rot.row(2) = back;

  CameraView view;
  view.id = id;
  view.azimuth_deg = azimuth_deg;
  view.elevation_deg = elevation_deg;
  view.distance = spec.distance;
  view.vfov_deg = spec.vfov_deg;
  view.width = spec.resolution;
  view.height = spec.resolution;
  view.near = spec.near;
  view.far = spec.far;
  view.world_to_camera.linear() = rot;
  view.world_to_camera.translation() = -rot * center;
  const double f = (view.height / 2.0) / std::tan(Radians(spec.vfov_deg) / 2.0);
  view.intrinsics = {f, f, view.width / 2.0, view.height / 2.0};
  return view;
}

std::vector<CameraView> BuildRig(const RigSpec& spec) {
  if (spec.n_views < 1) {
    throw Error(ErrorCode::kInvalidArgument, "rig needs at least one view");
  }
  std::vector<CameraView> rig;
  rig.reserve(spec.n_views);
  for (int i = 0; i < spec.n_views; ++i) {
    rig.push_back(MakeView(i, i * 360.0 / spec.n_views, spec.elevation_deg,
                           spec));
  }
  return rig;
}

Projection Project(const CameraView& view, const Eigen::Vector3d& world) {
  const Eigen::Vector3d p = view.world_to_camera * world;
  Projection out;
  out.depth = -p.z();
  const Intrinsics& k = view.intrinsics;
  if (out.depth != 0.0) {
    out.pixel = {k.cx + k.fx * p.x() / out.depth,
                 k.cy - k.fy * p.y() / out.depth};
  } else {
    out.pixel = {std::nan(""), std::nan("")};
  }
  out.in_frustum = out.depth > view.near && out.depth < view.far &&
                   out.pixel.x() >= 0.0 && out.pixel.x() < view.width &&
                   out.pixel.y() >= 0.0 && out.pixel.y() < view.height;
  return out;
}

Eigen::Vector3d UnprojectToCamera(const Intrinsics& k,
                                  const Eigen::Vector2d& pixel, double depth) {
  return {(pixel.x() - k.cx) * depth / k.fx, -(pixel.y() - k.cy) * depth / k.fy,
          -depth};
}

Eigen::Vector3d Unproject(const CameraView& view, const Eigen::Vector2d& pixel,
                          double depth) {
  return view.world_to_camera.inverse() *
         UnprojectToCamera(view.intrinsics, pixel, depth);
}

std::vector<CameraView> SubsampleRig(const std::vector<CameraView>& rig,
                                     int n) {
  if (n < 1 || rig.empty() || rig.size() % static_cast<size_t>(n) != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot subsample " + std::to_string(rig.size()) +
                    " views to " + std::to_string(n));
  }
  const size_t stride = rig.size() / n;
  std::vector<CameraView> out;
  for (size_t i = 0; i < rig.size(); i += stride) out.push_back(rig[i]);
  return out;
}

nlohmann::json ViewToJson(const CameraView& view) {
  nlohmann::json m = nlohmann::json::array();
  const Eigen::Matrix4d mat = view.world_to_camera.matrix();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m.push_back(mat(r, c));
  }
  return {{"id", view.id},
          {"azimuth", view.azimuth_deg},
          {"elevation", view.elevation_deg},
          {"distance", view.distance},
          {"vfov", view.vfov_deg},
          {"width", view.width},
          {"height", view.height},
          {"near", view.near},
          {"far", view.far},
          {"world_to_camera", m},
          {"intrinsics",
           {{"fx", view.intrinsics.fx},
            {"fy", view.intrinsics.fy},
            {"cx", view.intrinsics.cx},
            {"cy", view.intrinsics.cy}}}};
}

CameraView ViewFromJson(const nlohmann::json& j) {
  CameraView view;
  view.id = j.at("id").get<int>();
  view.azimuth_deg = j.at("azimuth").get<double>();
  view.elevation_deg = j.at("elevation").get<double>();
  view.distance = j.at("distance").get<double>();
  view.vfov_deg = j.at("vfov").get<double>();
  view.width = j.at("width").get<int>();
  view.height = j.at("height").get<int>();
  view.near = j.value("near", 0.1);
  view.far = j.value("far", 10.0);
  const auto& m = j.at("world_to_camera");
  if (m.size() != 16) {
    throw Error(ErrorCode::kParse, "world_to_camera must have 16 entries");
  }
  Eigen::Matrix4d mat;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) mat(r, c) = m[r * 4 + c].get<double>();
  }
  view.world_to_camera.matrix() = mat;
  const auto& k = j.at("intrinsics");
  view.intrinsics = {k.at("fx").get<double>(), k.at("fy").get<double>(),
                     k.at("cx").get<double>(), k.at("cy").get<double>()};
  return view;
}

nlohmann::json RigToJson(const std::vector<CameraView>& rig) {
  nlohmann::json views = nlohmann::json::array();
  for (const auto& v : rig) views.push_back(ViewToJson(v));
  return {{"views", views}};
}

std::vector<CameraView> RigFromJson(const nlohmann::json& j) {
  std::vector<CameraView> rig;
  for (const auto& v : j.at("views")) rig.push_back(ViewFromJson(v));
  return rig;
}

}  // namespace eval3d

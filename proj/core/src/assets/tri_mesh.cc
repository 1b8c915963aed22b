#include "eval3d/assets/tri_mesh.h"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <string>

#include "eval3d/common/error.h"

namespace eval3d {

double FaceArea(const TriMesh& mesh, size_t face) {
  const Face& f = mesh.faces[face];
  const Eigen::Vector3d& a = mesh.vertices[f[0]];
  const Eigen::Vector3d& b = mesh.vertices[f[1]];
  const Eigen::Vector3d& c = mesh.vertices[f[2]];
  return 0.5 * (b - a).cross(c - a).norm();
}

void ValidateMesh(const TriMesh& mesh) {
  if (mesh.faces.empty()) throw Error(ErrorCode::kEmptyMesh, "empty mesh");
  const auto n = static_cast<int64_t>(mesh.vertices.size());
  for (size_t i = 0; i < mesh.faces.size(); ++i) {
    for (int32_t idx : mesh.faces[i]) {
      if (idx < 0 || idx >= n) {
        throw Error(ErrorCode::kInvalidArgument,
                    "face " + std::to_string(i) + " references vertex " +
                        std::to_string(idx) + " of " + std::to_string(n));
      }
    }
  }
  for (const auto& v : mesh.vertices) {
    if (!v.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite vertex position");
    }
  }
}

TriMesh NormalizeMesh(const TriMesh& mesh) {
  ValidateMesh(mesh);
  Eigen::Vector3d lo = mesh.vertices.front();
  Eigen::Vector3d hi = lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const Eigen::Vector3d center = 0.5 * (lo + hi);
  const double extent = (hi - lo).maxCoeff();
  if (!(extent > 0.0)) {
    throw Error(ErrorCode::kDegenerateMesh, "mesh has zero extent");
  }
  const double scale = 2.0 / extent;

  TriMesh out;
  out.vertices.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) {
    Eigen::Vector3d p = (v - center) * scale;
    // Rounding can push an extreme coordinate a hair outside the cube.
    out.vertices.push_back(p.cwiseMax(-1.0).cwiseMin(1.0));
  }
  out.faces.reserve(mesh.faces.size());
  for (size_t i = 0; i < mesh.faces.size(); ++i) {
    out.faces.push_back(mesh.faces[i]);
    if (FaceArea(out, out.faces.size() - 1) < kDegenerateFaceArea) {
      out.faces.pop_back();
    }
  }
  if (out.faces.empty()) {
    throw Error(ErrorCode::kDegenerateMesh, "all faces are degenerate");
  }
  return out;
}

std::vector<Eigen::Vector3d> FaceNormals(const TriMesh& mesh) {
  std::vector<Eigen::Vector3d> normals;
  normals.reserve(mesh.faces.size());
  for (const Face& f : mesh.faces) {
    const Eigen::Vector3d& a = mesh.vertices[f[0]];
    const Eigen::Vector3d& b = mesh.vertices[f[1]];
    const Eigen::Vector3d& c = mesh.vertices[f[2]];
    normals.push_back((b - a).cross(c - a).normalized());
  }
  return normals;
}

std::vector<Eigen::Vector3d> VertexNormals(
    const TriMesh& mesh, const std::vector<Eigen::Vector3d>& face_normals) {
  std::vector<Eigen::Vector3d> acc(mesh.vertices.size(),
                                   Eigen::Vector3d::Zero());
  for (size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const Face& f = mesh.faces[fi];
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d& p = mesh.vertices[f[k]];
      const Eigen::Vector3d e1 = mesh.vertices[f[(k + 1) % 3]] - p;
      const Eigen::Vector3d e2 = mesh.vertices[f[(k + 2) % 3]] - p;
      const double denom = e1.norm() * e2.norm();
      if (denom <= 0.0) continue;
      const double angle =
          std::acos(std::clamp(e1.dot(e2) / denom, -1.0, 1.0));
      acc[f[k]] += angle * face_normals[fi];
    }
  }
  for (auto& n : acc) {
    const double len = n.norm();
    n = len > 1e-12 ? Eigen::Vector3d(n / len) : Eigen::Vector3d::Zero();
  }
  return acc;
}

TriMesh PrepareMesh(const TriMesh& raw) {
  TriMesh mesh = NormalizeMesh(raw);
  mesh.face_normals = FaceNormals(mesh);
  mesh.vertex_normals = VertexNormals(mesh, mesh.face_normals);
  return mesh;
}

}  // namespace eval3d

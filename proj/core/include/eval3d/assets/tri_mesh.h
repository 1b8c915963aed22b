#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <vector>

namespace eval3d {

using Face = std::array<int32_t, 3>;

// Triangle mesh. Immutable by convention once prepared; shared read-only
// across per-view workers.
struct TriMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<Face> faces;
  // Empty when not computed. A zero vertex normal marks a vertex that no
  // face references.
  std::vector<Eigen::Vector3d> vertex_normals;
  std::vector<Eigen::Vector3d> face_normals;

  size_t vertex_count() const { return vertices.size(); }
  size_t face_count() const { return faces.size(); }
};

// Faces with area below this (after normalization) are dropped.
inline constexpr double kDegenerateFaceArea = 1e-12;

double FaceArea(const TriMesh& mesh, size_t face);

// Throws kInvalidArgument when a face references a missing vertex and
// kEmptyMesh when there are no faces.
void ValidateMesh(const TriMesh& mesh);

// Centers the axis-aligned bounding box at the origin and scales uniformly so
// the largest extent is exactly 2, then drops degenerate faces. Normals are
// not carried over.
TriMesh NormalizeMesh(const TriMesh& mesh);

// Right-hand-rule unit normal per face.
std::vector<Eigen::Vector3d> FaceNormals(const TriMesh& mesh);

// Angle-weighted average of incident face normals, renormalized. Vertices
// with no incident face get the zero vector.
std::vector<Eigen::Vector3d> VertexNormals(
    const TriMesh& mesh, const std::vector<Eigen::Vector3d>& face_normals);

inline bool IsValidNormal(const Eigen::Vector3d& n) {
  return n.squaredNorm() > 0.5;
}

// NormalizeMesh followed by face and vertex normals.
TriMesh PrepareMesh(const TriMesh& raw);

}  // namespace eval3d

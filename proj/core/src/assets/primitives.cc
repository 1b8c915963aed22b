#include "eval3d/assets/primitives.h"

#include <Eigen/Geometry>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include "eval3d/common/error.h"

namespace eval3d {

TriMesh MakeIcosphere(int subdivisions) {
  if (subdivisions < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative subdivision level");
  }
  TriMesh mesh;
  const double ring_y = 1.0 / std::sqrt(5.0);
  const double ring_r = 2.0 / std::sqrt(5.0);
  const double step = 2.0 * std::numbers::pi / 5.0;
  mesh.vertices.emplace_back(0.0, 1.0, 0.0);
  for (int k = 0; k < 5; ++k) {
    mesh.vertices.emplace_back(ring_r * std::cos(k * step), ring_y,
                               ring_r * std::sin(k * step));
  }
  for (int k = 0; k < 5; ++k) {
    const double a = (k + 0.5) * step;
    mesh.vertices.emplace_back(ring_r * std::cos(a), -ring_y,
                               ring_r * std::sin(a));
  }
  mesh.vertices.emplace_back(0.0, -1.0, 0.0);
  for (int k = 0; k < 5; ++k) {
    const int u0 = 1 + k, u1 = 1 + (k + 1) % 5;
    const int l0 = 6 + k, l1 = 6 + (k + 1) % 5;
    mesh.faces.push_back({0, u0, u1});
    mesh.faces.push_back({u0, l0, u1});
    mesh.faces.push_back({u1, l0, l1});
    mesh.faces.push_back({11, l1, l0});
  }

  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int32_t, int32_t>, int32_t> midpoints;
    auto midpoint = [&](int32_t a, int32_t b) {
      const auto key = std::minmax(a, b);
      auto it = midpoints.find(key);
      if (it != midpoints.end()) return it->second;
      mesh.vertices.push_back(
          (mesh.vertices[a] + mesh.vertices[b]).normalized());
      const auto idx = static_cast<int32_t>(mesh.vertices.size() - 1);
      midpoints.emplace(key, idx);
      return idx;
    };
    std::vector<Face> next;
    next.reserve(mesh.faces.size() * 4);
    for (const Face& f : mesh.faces) {
      const int32_t ab = midpoint(f[0], f[1]);
      const int32_t bc = midpoint(f[1], f[2]);
      const int32_t ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.faces = std::move(next);
  }

  // Orient every face outward.
  for (Face& f : mesh.faces) {
    const Eigen::Vector3d& a = mesh.vertices[f[0]];
    const Eigen::Vector3d n =
        (mesh.vertices[f[1]] - a).cross(mesh.vertices[f[2]] - a);
    if (n.dot(a + mesh.vertices[f[1]] + mesh.vertices[f[2]]) < 0.0) {
      std::swap(f[1], f[2]);
    }
  }
  return mesh;
}

TriMesh MakeBox(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
  TriMesh mesh;
  for (int i = 0; i < 8; ++i) {
    mesh.vertices.emplace_back((i & 1) ? hi.x() : lo.x(),
                               (i & 2) ? hi.y() : lo.y(),
                               (i & 4) ? hi.z() : lo.z());
  }
  // Quads as (a, b, c, d) counter-clockwise seen from outside.
  const int quads[6][4] = {
      {0, 4, 6, 2},  // -x
      {1, 3, 7, 5},  // +x
      {0, 1, 5, 4},  // -y
      {2, 6, 7, 3},  // +y
      {0, 2, 3, 1},  // -z
      {4, 5, 7, 6},  // +z
  };
  for (const auto& q : quads) {
    mesh.faces.push_back({q[0], q[1], q[2]});
    mesh.faces.push_back({q[0], q[2], q[3]});
  }
  return mesh;
}

TriMesh MakePlaneGrid(int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "grid size < 1");
  TriMesh mesh;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mesh.vertices.emplace_back(-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n, 0.0);
    }
  }
  auto id = [n](int i, int j) { return static_cast<int32_t>(j * (n + 1) + i); };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      mesh.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return mesh;
}

}  // namespace eval3d

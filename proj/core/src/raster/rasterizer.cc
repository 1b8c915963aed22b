#include "eval3d/raster/rasterizer.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eval3d/common/error.h"
#include "eval3d/common/parallel.h"

namespace eval3d {
namespace {

struct ScreenVertex {
  Eigen::Vector3d cam;  // camera-space position
  double x = 0, y = 0;  // pixel coordinates
  double depth = 0;
};

double Edge(const ScreenVertex& a, const ScreenVertex& b, double px,
            double py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

// With positive triangle area in this y-down edge convention, an edge owns
// its boundary pixels when it is a top edge or a left edge.
bool IsTopLeft(const ScreenVertex& a, const ScreenVertex& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return dy < 0.0 || (dy == 0.0 && dx > 0.0);
}

bool Covers(double w, bool top_left) { return w > 0.0 || (w == 0.0 && top_left); }

}  // namespace

RenderBuffers Rasterize(const TriMesh& mesh, const CameraView& view,
                        Shading shading) {
  if (mesh.face_normals.size() != mesh.faces.size() ||
      (shading == Shading::kVertexInterpolated &&
       mesh.vertex_normals.size() != mesh.vertices.size())) {
    throw Error(ErrorCode::kInvalidArgument,
                "rasterize: mesh normals not computed");
  }
  const int w = view.width;
  const int h = view.height;
  RenderBuffers out{Grid<Eigen::Vector3f>(w, h, Eigen::Vector3f::Zero()),
                    Grid<float>(w, h, 0.0f), Grid<uint8_t>(w, h, 0),
                    Grid<int32_t>(w, h, -1)};
  Grid<double> zbuf(w, h, std::numeric_limits<double>::infinity());

  const Eigen::Matrix3d rot = view.Rotation();
  const Intrinsics& k = view.intrinsics;
  std::vector<ScreenVertex> sv(mesh.vertices.size());
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    ScreenVertex& s = sv[i];
    s.cam = view.world_to_camera * mesh.vertices[i];
    s.depth = -s.cam.z();
    if (s.depth > 0.0) {
      s.x = k.cx + k.fx * s.cam.x() / s.depth;
      s.y = k.cy - k.fy * s.cam.y() / s.depth;
    }
  }

  for (size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const Face& f = mesh.faces[fi];
    int i0 = f[0], i1 = f[1], i2 = f[2];
    if (sv[i0].depth <= view.near || sv[i1].depth <= view.near ||
        sv[i2].depth <= view.near) {
      continue;
    }
    double area = Edge(sv[i0], sv[i1], sv[i2].x, sv[i2].y);
    if (area == 0.0) continue;
    if (area < 0.0) {
      std::swap(i1, i2);
      area = -area;
    }
    const ScreenVertex& a = sv[i0];
    const ScreenVertex& b = sv[i1];
    const ScreenVertex& c = sv[i2];
    const bool tl0 = IsTopLeft(b, c);
    const bool tl1 = IsTopLeft(c, a);
    const bool tl2 = IsTopLeft(a, b);

    const int x0 = std::max(0, static_cast<int>(std::floor(std::min({a.x, b.x, c.x}))));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max({a.x, b.x, c.x}))));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min({a.y, b.y, c.y}))));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max({a.y, b.y, c.y}))));
    if (x0 > x1 || y0 > y1) continue;

    const Eigen::Vector3d face_n = rot * mesh.face_normals[fi];
    for (int y = y0; y <= y1; ++y) {
      const double py = y + 0.5;
      for (int x = x0; x <= x1; ++x) {
        const double px = x + 0.5;
        const double w0 = Edge(b, c, px, py);
        const double w1 = Edge(c, a, px, py);
        const double w2 = Edge(a, b, px, py);
        if (!Covers(w0, tl0) || !Covers(w1, tl1) || !Covers(w2, tl2)) continue;
        // Perspective-correct barycentrics.
        const double q0 = w0 / area / a.depth;
        const double q1 = w1 / area / b.depth;
        const double q2 = w2 / area / c.depth;
        const double inv = q0 + q1 + q2;
        const double depth = 1.0 / inv;
        if (!(depth > view.near && depth < view.far)) continue;
        if (!(depth < zbuf.at(x, y))) continue;
        zbuf.at(x, y) = depth;

        const double b0 = q0 * depth, b1 = q1 * depth, b2 = q2 * depth;
        Eigen::Vector3d n = face_n;
        if (shading == Shading::kVertexInterpolated) {
          const Eigen::Vector3d interp =
              rot * (b0 * mesh.vertex_normals[i0] +
                     b1 * mesh.vertex_normals[i1] +
                     b2 * mesh.vertex_normals[i2]);
          if (interp.norm() > 1e-9) n = interp.normalized();
        }
        const Eigen::Vector3d p = b0 * a.cam + b1 * b.cam + b2 * c.cam;
        if (n.dot(p) > 0.0) n = -n;

        out.depth.at(x, y) = static_cast<float>(depth);
        out.normal.at(x, y) = n.cast<float>().normalized();
        out.opacity.at(x, y) = 1;
        out.face_id.at(x, y) = static_cast<int32_t>(fi);
      }
    }
  }
  return out;
}

std::vector<RenderBuffers> RasterizeAll(const TriMesh& mesh,
                                        std::span<const CameraView> views,
                                        Shading shading) {
  std::vector<RenderBuffers> out(views.size());
  ParallelFor(views.size(), [&](size_t i) {
    out[i] = Rasterize(mesh, views[i], shading);
  });
  return out;
}

}  // namespace eval3d

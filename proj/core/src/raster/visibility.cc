#include "eval3d/raster/visibility.h"

#include <algorithm>
#include <cmath>

#include "eval3d/common/error.h"
#include "eval3d/common/parallel.h"

namespace eval3d {

double VisibilityEpsilon(double depth) { return std::max(1e-3, 1e-3 * depth); }

std::vector<uint8_t> VisibleInView(const TriMesh& mesh, const CameraView& view,
                                   const RenderBuffers& buffers) {
  std::vector<uint8_t> flags(mesh.vertices.size(), 0);
  for (size_t v = 0; v < mesh.vertices.size(); ++v) {
    const Projection p = Project(view, mesh.vertices[v]);
    if (!p.in_frustum) continue;
    const int x = static_cast<int>(std::floor(p.pixel.x()));
    const int y = static_cast<int>(std::floor(p.pixel.y()));
    if (buffers.opacity.InBounds(x, y) && buffers.Valid(x, y) &&
        p.depth <= buffers.depth.at(x, y) + VisibilityEpsilon(p.depth)) {
      flags[v] = 1;
      continue;
    }
    // A vertex on the silhouette can land on a background pixel, and one
    // seen at a grazing angle can be undercut by its own faces. Either way
    // it is visible when one of its faces is front-most next to it.
    for (int dy = -1; dy <= 1 && !flags[v]; ++dy) {
      for (int dx = -1; dx <= 1 && !flags[v]; ++dx) {
        if (!buffers.opacity.InBounds(x + dx, y + dy)) continue;
        const int32_t face = buffers.face_id.at(x + dx, y + dy);
        if (face < 0) continue;
        const Face& f = mesh.faces[face];
        const auto vi = static_cast<int32_t>(v);
        flags[v] = f[0] == vi || f[1] == vi || f[2] == vi;
      }
    }
  }
  return flags;
}

VisibilityTable::VisibilityTable(size_t vertex_count, size_t view_count)
    : view_count_(view_count),
      flags_(vertex_count * view_count, 0),
      counts_(vertex_count, 0) {}

void VisibilityTable::SetView(size_t view, const std::vector<uint8_t>& flags) {
  for (size_t v = 0; v < counts_.size(); ++v) {
    uint8_t& slot = flags_[v * view_count_ + view];
    counts_[v] += static_cast<int>(flags[v] != 0) - static_cast<int>(slot != 0);
    slot = flags[v] != 0;
  }
}

VisibilityTable VertexVisibility(const TriMesh& mesh,
                                 std::span<const CameraView> rig,
                                 std::span<const RenderBuffers> buffers) {
  if (rig.size() != buffers.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "visibility: one render buffer per view required");
  }
  VisibilityTable table(mesh.vertices.size(), rig.size());
  for (size_t i = 0; i < rig.size(); ++i) {
    table.SetView(i, VisibleInView(mesh, rig[i], buffers[i]));
  }
  return table;
}

VisibilityTable ComputeVisibility(const TriMesh& mesh,
                                  std::span<const CameraView> rig) {
  std::vector<std::vector<uint8_t>> per_view(rig.size());
  ParallelFor(rig.size(), [&](size_t i) {
    const RenderBuffers buffers = Rasterize(mesh, rig[i]);
    per_view[i] = VisibleInView(mesh, rig[i], buffers);
  });
  VisibilityTable table(mesh.vertices.size(), rig.size());
  for (size_t i = 0; i < rig.size(); ++i) table.SetView(i, per_view[i]);
  return table;
}

}  // namespace eval3d

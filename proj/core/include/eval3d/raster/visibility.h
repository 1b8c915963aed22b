#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eval3d/assets/tri_mesh.h"
#include "eval3d/camrig/camera.h"
#include "eval3d/raster/rasterizer.h"

namespace eval3d {

// Depth slack for the visibility test: max(1e-3, 1e-3 * depth).
double VisibilityEpsilon(double depth);

// Per-vertex visibility flags for one view. A vertex is visible when it
// projects in-frustum onto an opaque pixel and its depth is within
// VisibilityEpsilon of the z-buffer there, or when a face incident to it is
// front-most at that pixel or one of its 8 neighbours.
std::vector<uint8_t> VisibleInView(const TriMesh& mesh, const CameraView& view,
                                   const RenderBuffers& buffers);

class VisibilityTable {
 public:
  VisibilityTable() = default;
  VisibilityTable(size_t vertex_count, size_t view_count);

  size_t vertex_count() const { return counts_.size(); }
  size_t view_count() const { return view_count_; }

  bool visible(size_t vertex, size_t view) const {
    return flags_[vertex * view_count_ + view] != 0;
  }
  int count(size_t vertex) const { return counts_[vertex]; }
  const std::vector<int>& counts() const { return counts_; }

  // Fills column `view` from per-vertex flags.
  void SetView(size_t view, const std::vector<uint8_t>& flags);

 private:
  size_t view_count_ = 0;
  std::vector<uint8_t> flags_;  // vertex-major
  std::vector<int> counts_;
};

VisibilityTable VertexVisibility(const TriMesh& mesh,
                                 std::span<const CameraView> rig,
                                 std::span<const RenderBuffers> buffers);

// Renders each view on the fly and keeps only the flags, so memory stays
// bounded for large rigs.
VisibilityTable ComputeVisibility(const TriMesh& mesh,
                                  std::span<const CameraView> rig);

}  // namespace eval3d

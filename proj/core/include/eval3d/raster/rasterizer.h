#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "eval3d/assets/tri_mesh.h"
#include "eval3d/camrig/camera.h"
#include "eval3d/common/grid.h"

namespace eval3d {

enum class Shading { kFaceFlat, kVertexInterpolated };

// Geometric companions of one rendered view. Background pixels hold a zero
// normal, depth 0, opacity 0 and face id -1; opacity, valid depth and a face
// id are always set together.
struct RenderBuffers {
  Grid<Eigen::Vector3f> normal;  // camera space, unit, faces the camera
  Grid<float> depth;             // camera-space depth in (near, far)
  Grid<uint8_t> opacity;
  Grid<int32_t> face_id;

  int width() const { return depth.width(); }
  int height() const { return depth.height(); }
  bool Valid(int x, int y) const { return opacity.at(x, y) != 0; }
};

// Z-buffered rasterization with a top-left fill rule and no back-face
// culling. Equal depths keep the lower face index. Triangles with a vertex
// at or behind the near plane are skipped rather than clipped. Requires
// face normals (and vertex normals for kVertexInterpolated).
RenderBuffers Rasterize(const TriMesh& mesh, const CameraView& view,
                        Shading shading = Shading::kVertexInterpolated);

std::vector<RenderBuffers> RasterizeAll(const TriMesh& mesh,
                                        std::span<const CameraView> views,
                                        Shading shading =
                                            Shading::kVertexInterpolated);

}  // namespace eval3d

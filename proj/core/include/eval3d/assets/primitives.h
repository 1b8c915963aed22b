#pragma once

#include "eval3d/assets/tri_mesh.h"

namespace eval3d {

// Unit-radius icosphere with vertices at both poles of the y axis,
// outward-wound. Vertex count is 10 * 4^subdivisions + 2.
TriMesh MakeIcosphere(int subdivisions);

// Axis-aligned box, 8 vertices / 12 outward-wound triangles.
TriMesh MakeBox(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi);

// n x n quad grid on the z = 0 plane spanning [-1, 1]^2, facing +z.
TriMesh MakePlaneGrid(int n);

}  // namespace eval3d

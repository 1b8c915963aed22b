#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "eval3d/assets/tri_mesh.h"
#include "eval3d/common/grid.h"

namespace eval3d {

// Loads OBJ (ascii) or PLY (ascii / binary_little_endian 1.0), chosen by
// extension. Polygons are fan-triangulated. Only positions, faces and
// per-vertex normals are read; everything else is skipped. Non-manifold
// input is accepted. Throws kEmptyMesh when the file has no faces.
TriMesh LoadMesh(const std::filesystem::path& path);

TriMesh ParseObj(std::istream& in);
TriMesh ParsePly(std::istream& in);

// Writes binary_little_endian PLY: vertex x,y,z float32 (+ red,green,blue
// uchar when colors are given), face uchar count + int32 indices.
void WritePly(const std::filesystem::path& path, const TriMesh& mesh,
              const std::vector<Rgb8>* colors = nullptr);

void WriteObj(const std::filesystem::path& path, const TriMesh& mesh);

}  // namespace eval3d

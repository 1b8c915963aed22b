#pragma once

#include <filesystem>

#include "eval3d/backends/tensor_file.h"
#include "eval3d/common/grid.h"
#include "eval3d/raster/rasterizer.h"

namespace eval3d {

// (n + 1) / 2 mapped to 0..255 per channel; background is white.
RgbImage ColorizeNormals(const RenderBuffers& buffers);
GrayImage OpacityImage(const RenderBuffers& buffers);

Tensor DepthTensor(const RenderBuffers& buffers);    // H x W f32
Tensor NormalTensor(const RenderBuffers& buffers);   // H x W x 3 f32
Tensor OpacityTensor(const RenderBuffers& buffers);  // H x W u8

}  // namespace eval3d

#pragma once

#include <filesystem>

#include "eval3d/common/grid.h"

namespace eval3d {

// 8-bit PNG helpers. Reading converts any colour type to RGB.
RgbImage ReadPngRgb(const std::filesystem::path& path);
void WritePngRgb(const std::filesystem::path& path, const RgbImage& image);
void WritePngGray(const std::filesystem::path& path, const GrayImage& image);

}  // namespace eval3d

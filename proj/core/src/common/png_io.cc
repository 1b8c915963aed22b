#include "eval3d/common/png_io.h"

#include <png.h>

#include <cstring>
#include <memory>

#include "eval3d/common/error.h"

namespace eval3d {
namespace {

struct PngImageGuard {
  png_image image;
  PngImageGuard() {
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImageGuard() { png_image_free(&image); }
};

void WriteRaw(const std::filesystem::path& path, int width, int height,
              png_uint_32 format, const void* pixels) {
  PngImageGuard guard;
  guard.image.width = static_cast<png_uint_32>(width);
  guard.image.height = static_cast<png_uint_32>(height);
  guard.image.format = format;
  if (!png_image_write_to_file(&guard.image, path.c_str(), 0, pixels, 0,
                               nullptr)) {
    throw Error(ErrorCode::kIo, "cannot write PNG " + path.string() + ": " +
                                    guard.image.message);
  }
}

}  // namespace

RgbImage ReadPngRgb(const std::filesystem::path& path) {
  PngImageGuard guard;
  if (!png_image_begin_read_from_file(&guard.image, path.c_str())) {
    throw Error(ErrorCode::kIo, "cannot read PNG " + path.string() + ": " +
                                    guard.image.message);
  }
  guard.image.format = PNG_FORMAT_RGB;
  RgbImage out(static_cast<int>(guard.image.width),
               static_cast<int>(guard.image.height));
  static_assert(sizeof(Rgb8) == 3);
  if (!png_image_finish_read(&guard.image, nullptr, out.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIo, "cannot decode PNG " + path.string() + ": " +
                                    guard.image.message);
  }
  return out;
}

void WritePngRgb(const std::filesystem::path& path, const RgbImage& image) {
  WriteRaw(path, image.width(), image.height(), PNG_FORMAT_RGB, image.data());
}

void WritePngGray(const std::filesystem::path& path, const GrayImage& image) {
  WriteRaw(path, image.width(), image.height(), PNG_FORMAT_GRAY,
           image.data());
}

}  // namespace eval3d

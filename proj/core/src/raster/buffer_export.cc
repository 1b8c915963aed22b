#include "eval3d/raster/buffer_export.h"

#include <algorithm>
#include <cmath>

namespace eval3d {

RgbImage ColorizeNormals(const RenderBuffers& buffers) {
  RgbImage image(buffers.width(), buffers.height(), Rgb8{255, 255, 255});
  auto channel = [](float v) {
    return static_cast<unsigned char>(
        std::lround(std::clamp((v + 1.0f) * 0.5f, 0.0f, 1.0f) * 255.0f));
  };
  for (int y = 0; y < buffers.height(); ++y) {
    for (int x = 0; x < buffers.width(); ++x) {
      if (!buffers.Valid(x, y)) continue;
      const Eigen::Vector3f& n = buffers.normal.at(x, y);
      image.at(x, y) = {channel(n.x()), channel(n.y()), channel(n.z())};
    }
  }
  return image;
}

GrayImage OpacityImage(const RenderBuffers& buffers) {
  GrayImage image(buffers.width(), buffers.height(), 0);
  for (size_t i = 0; i < image.size(); ++i) {
    image.data()[i] = buffers.opacity.data()[i] ? 255 : 0;
  }
  return image;
}

Tensor DepthTensor(const RenderBuffers& buffers) {
  return GridToTensor(buffers.depth);
}

Tensor NormalTensor(const RenderBuffers& buffers) {
  std::vector<float> values;
  values.reserve(buffers.normal.size() * 3);
  for (const auto& n : buffers.normal.pixels()) {
    values.insert(values.end(), {n.x(), n.y(), n.z()});
  }
  return Tensor({static_cast<uint64_t>(buffers.height()),
                 static_cast<uint64_t>(buffers.width()), 3},
                std::move(values));
}

Tensor OpacityTensor(const RenderBuffers& buffers) {
  return Tensor({static_cast<uint64_t>(buffers.height()),
                 static_cast<uint64_t>(buffers.width())},
                std::vector<uint8_t>(buffers.opacity.pixels().begin(),
                                     buffers.opacity.pixels().end()));
}

}  // namespace eval3d

#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace eval3d {

// Row-major H x W image of arbitrary pixel type.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, const T& fill = T())
      : width_(width), height_(height),
        data_(static_cast<size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool InBounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  T& at(int x, int y) {
    assert(InBounds(x, y));
    return data_[static_cast<size_t>(y) * width_ + x];
  }
  const T& at(int x, int y) const {
    assert(InBounds(x, y));
    return data_[static_cast<size_t>(y) * width_ + x];
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> pixels() { return data_; }
  std::span<const T> pixels() const { return data_; }

  bool operator==(const Grid&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

struct Rgb8 {
  unsigned char r = 0, g = 0, b = 0;
  bool operator==(const Rgb8&) const = default;
};

using RgbImage = Grid<Rgb8>;
using GrayImage = Grid<unsigned char>;

}  // namespace eval3d

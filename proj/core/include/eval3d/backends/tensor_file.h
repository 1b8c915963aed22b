#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "eval3d/common/grid.h"

namespace eval3d {

// Binary tensor interchange file:
//   "ETNS" | u32 version (=1) | u8 dtype (1 = f32, 2 = u8) | u32 ndim |
//   ndim x u64 dims | row-major payload
// All integers and payload values are little-endian.
enum class DType : uint8_t { kF32 = 1, kU8 = 2 };

inline constexpr uint32_t kTensorFileVersion = 1;

class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<uint64_t> dims, std::vector<float> values);
  Tensor(std::vector<uint64_t> dims, std::vector<uint8_t> values);

  static Tensor Zeros(DType dtype, std::vector<uint64_t> dims);

  DType dtype() const;
  const std::vector<uint64_t>& dims() const { return dims_; }
  uint64_t element_count() const;
  size_t element_size() const { return dtype() == DType::kF32 ? 4 : 1; }

  // Throw kShapeContract on dtype mismatch.
  std::span<const float> f32() const;
  std::span<float> f32();
  std::span<const uint8_t> u8() const;
  std::span<uint8_t> u8();

  bool operator==(const Tensor&) const = default;

 private:
  std::vector<uint64_t> dims_;
  std::variant<std::vector<float>, std::vector<uint8_t>> data_;
};

std::string DescribeDims(const std::vector<uint64_t>& dims);

std::vector<uint8_t> EncodeTensor(const Tensor& tensor);
Tensor DecodeTensor(std::span<const uint8_t> bytes);

void WriteTensor(const std::filesystem::path& path, const Tensor& tensor);
// Errors: kBadMagic, kBadVersion, kBadDtype, kShortPayload ("short
// payload"), kParse for zero dims or trailing bytes, kIo when unreadable.
Tensor ReadTensor(const std::filesystem::path& path);

// Grid conversions. Images become H x W x 3 u8.
Tensor GridToTensor(const Grid<float>& grid);
Grid<float> TensorToGrid(const Tensor& tensor);
Tensor ImageToTensor(const RgbImage& image);
RgbImage TensorToImage(const Tensor& tensor);

}  // namespace eval3d

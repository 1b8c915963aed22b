#include "eval3d/backends/tensor_file.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>

#include "eval3d/common/error.h"

namespace eval3d {
namespace {

static_assert(std::endian::native == std::endian::little,
              "TensorFile I/O assumes a little-endian host");

constexpr char kMagic[4] = {'E', 'T', 'N', 'S'};

uint64_t Product(const std::vector<uint64_t>& dims) {
  return std::accumulate(dims.begin(), dims.end(), uint64_t{1},
                         std::multiplies<>());
}

void CheckDims(const std::vector<uint64_t>& dims, uint64_t count) {
  if (dims.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "tensor needs >= 1 dimension");
  }
  for (uint64_t d : dims) {
    if (d == 0) throw Error(ErrorCode::kInvalidArgument, "zero dimension");
  }
  if (Product(dims) != count) {
    throw Error(ErrorCode::kInvalidArgument,
                "tensor value count does not match dims " + DescribeDims(dims));
  }
}

template <typename T>
void Append(std::vector<uint8_t>* out, const T& value) {
  const auto* p = reinterpret_cast<const uint8_t*>(&value);
  out->insert(out->end(), p, p + sizeof(T));
}

class Cursor {
 public:
  explicit Cursor(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T Take(const char* what) {
    if (remaining() < sizeof(T)) {
      throw Error(ErrorCode::kShortPayload, std::string("short header: ") + what);
    }
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  size_t remaining() const { return bytes_.size() - pos_; }
  const uint8_t* here() const { return bytes_.data() + pos_; }

 private:
  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
};

}  // namespace

Tensor::Tensor(std::vector<uint64_t> dims, std::vector<float> values)
    : dims_(std::move(dims)), data_(std::move(values)) {
  CheckDims(dims_, std::get<0>(data_).size());
}

Tensor::Tensor(std::vector<uint64_t> dims, std::vector<uint8_t> values)
    : dims_(std::move(dims)), data_(std::move(values)) {
  CheckDims(dims_, std::get<1>(data_).size());
}

Tensor Tensor::Zeros(DType dtype, std::vector<uint64_t> dims) {
  const uint64_t n = Product(dims);
  if (dtype == DType::kF32) return Tensor(std::move(dims), std::vector<float>(n));
  return Tensor(std::move(dims), std::vector<uint8_t>(n));
}

DType Tensor::dtype() const {
  return data_.index() == 0 ? DType::kF32 : DType::kU8;
}

uint64_t Tensor::element_count() const {
  return dims_.empty() ? 0 : Product(dims_);
}

std::span<const float> Tensor::f32() const {
  if (data_.index() != 0) throw Error(ErrorCode::kShapeContract, "tensor is not f32");
  return std::get<0>(data_);
}
std::span<float> Tensor::f32() {
  if (data_.index() != 0) throw Error(ErrorCode::kShapeContract, "tensor is not f32");
  return std::get<0>(data_);
}
std::span<const uint8_t> Tensor::u8() const {
  if (data_.index() != 1) throw Error(ErrorCode::kShapeContract, "tensor is not u8");
  return std::get<1>(data_);
}
std::span<uint8_t> Tensor::u8() {
  if (data_.index() != 1) throw Error(ErrorCode::kShapeContract, "tensor is not u8");
  return std::get<1>(data_);
}

std::string DescribeDims(const std::vector<uint64_t>& dims) {
  std::string s;
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i) s += "×";
    s += std::to_string(dims[i]);
  }
  return s;
}

std::vector<uint8_t> EncodeTensor(const Tensor& tensor) {
  std::vector<uint8_t> out;
  const uint64_t payload = tensor.element_count() * tensor.element_size();
  out.reserve(13 + 8 * tensor.dims().size() + payload);
  out.insert(out.end(), kMagic, kMagic + 4);
  Append(&out, kTensorFileVersion);
  Append(&out, static_cast<uint8_t>(tensor.dtype()));
  Append(&out, static_cast<uint32_t>(tensor.dims().size()));
  for (uint64_t d : tensor.dims()) Append(&out, d);
  const auto* p = tensor.dtype() == DType::kF32
                      ? reinterpret_cast<const uint8_t*>(tensor.f32().data())
                      : tensor.u8().data();
  out.insert(out.end(), p, p + payload);
  return out;
}

Tensor DecodeTensor(std::span<const uint8_t> bytes) {
  Cursor cur(bytes);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "bad magic");
  }
  cur.Take<uint32_t>("magic");
  const auto version = cur.Take<uint32_t>("version");
  if (version != kTensorFileVersion) {
    throw Error(ErrorCode::kBadVersion,
                "unsupported version " + std::to_string(version));
  }
  const auto dtype = cur.Take<uint8_t>("dtype");
  if (dtype != 1 && dtype != 2) {
    throw Error(ErrorCode::kBadDtype, "bad dtype " + std::to_string(dtype));
  }
  const auto ndim = cur.Take<uint32_t>("ndim");
  if (ndim == 0) throw Error(ErrorCode::kParse, "zero-rank tensor");
  std::vector<uint64_t> dims(ndim);
  for (auto& d : dims) {
    d = cur.Take<uint64_t>("dims");
    if (d == 0) throw Error(ErrorCode::kParse, "zero dimension");
  }
  const uint64_t count = Product(dims);
  const size_t elem = dtype == 1 ? 4 : 1;
  if (count > cur.remaining() / elem) {
    throw Error(ErrorCode::kShortPayload, "short payload");
  }
  const size_t payload = count * elem;
  if (cur.remaining() != payload) {
    throw Error(ErrorCode::kParse, "trailing bytes after payload");
  }
  if (dtype == 1) {
    std::vector<float> values(count);
    std::memcpy(values.data(), cur.here(), payload);
    return Tensor(std::move(dims), std::move(values));
  }
  return Tensor(std::move(dims),
                std::vector<uint8_t>(cur.here(), cur.here() + payload));
}

void WriteTensor(const std::filesystem::path& path, const Tensor& tensor) {
  const std::vector<uint8_t> bytes = EncodeTensor(tensor);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

Tensor ReadTensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  const std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return DecodeTensor(bytes);
}

Tensor GridToTensor(const Grid<float>& grid) {
  return Tensor({static_cast<uint64_t>(grid.height()),
                 static_cast<uint64_t>(grid.width())},
                std::vector<float>(grid.pixels().begin(), grid.pixels().end()));
}

Grid<float> TensorToGrid(const Tensor& tensor) {
  if (tensor.dims().size() != 2) {
    throw Error(ErrorCode::kShapeContract,
                "expected H×W, got " + DescribeDims(tensor.dims()));
  }
  Grid<float> grid(static_cast<int>(tensor.dims()[1]),
                   static_cast<int>(tensor.dims()[0]));
  const auto src = tensor.f32();
  std::copy(src.begin(), src.end(), grid.data());
  return grid;
}

Tensor ImageToTensor(const RgbImage& image) {
  std::vector<uint8_t> values(image.size() * 3);
  std::memcpy(values.data(), image.data(), values.size());
  return Tensor({static_cast<uint64_t>(image.height()),
                 static_cast<uint64_t>(image.width()), 3},
                std::move(values));
}

RgbImage TensorToImage(const Tensor& tensor) {
  if (tensor.dims().size() != 3 || tensor.dims()[2] != 3) {
    throw Error(ErrorCode::kShapeContract,
                "expected H×W×3, got " + DescribeDims(tensor.dims()));
  }
  RgbImage image(static_cast<int>(tensor.dims()[1]),
                 static_cast<int>(tensor.dims()[0]));
  const auto src = tensor.u8();
  std::memcpy(image.data(), src.data(), src.size());
  return image;
}

}  // namespace eval3d

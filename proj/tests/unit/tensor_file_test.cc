#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <random>

#include "eval3d/backends/tensor_file.h"
#include "eval3d/common/error.h"
#include "test_support.h"

namespace eval3d {
namespace {

ErrorCode DecodeError(const std::vector<uint8_t>& bytes) {
  try {
    DecodeTensor(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected decode failure";
  return ErrorCode::kIo;
}

TEST(TensorFileTest, TwoByThreeF32IsFiftyThreeBytes) {
  testing::TempDir dir;
  const Tensor t({2, 3}, std::vector<float>(6, 0.0f));
  WriteTensor(dir / "z.etns", t);
  // magic 4 + version 4 + dtype 1 + ndim 4 + dims 16 + payload 24
  EXPECT_EQ(std::filesystem::file_size(dir / "z.etns"), 4u + 4 + 1 + 4 + 16 + 24);
  EXPECT_EQ(ReadTensor(dir / "z.etns"), t);
}

TEST(TensorFileTest, HeaderLayoutIsLittleEndian) {
  const Tensor t({1}, std::vector<uint8_t>{7});
  const auto bytes = EncodeTensor(t);
  ASSERT_EQ(bytes.size(), 4u + 4 + 1 + 4 + 8 + 1);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "ETNS");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5] | bytes[6] | bytes[7], 0);
  EXPECT_EQ(bytes[8], 2);
  EXPECT_EQ(bytes[9], 1);
  EXPECT_EQ(bytes[13], 1);
  EXPECT_EQ(bytes.back(), 7);
}

TEST(TensorFileTest, LargeF32PayloadSize) {
  const Tensor t = Tensor::Zeros(DType::kF32, {512, 512});
  const size_t header = 4 + 4 + 1 + 4 + 2 * 8;
  EXPECT_EQ(EncodeTensor(t).size() - header, 512u * 512u * 4u);
}

TEST(TensorFileTest, RandomRoundTripIsBitExact) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> dim(1, 6), ndim(1, 4);
  std::normal_distribution<float> val(0, 100);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<uint64_t> dims(ndim(rng));
    uint64_t n = 1;
    for (auto& d : dims) n *= (d = dim(rng));
    Tensor t;
    if (trial % 2 == 0) {
      std::vector<float> v(n);
      for (auto& x : v) x = val(rng);
      if (n > 1) v[0] = -0.0f;
      t = Tensor(dims, std::move(v));
    } else {
      std::vector<uint8_t> v(n);
      for (auto& x : v) x = static_cast<uint8_t>(rng());
      t = Tensor(dims, std::move(v));
    }
    const auto bytes = EncodeTensor(t);
    const Tensor back = DecodeTensor(bytes);
    EXPECT_EQ(back.dims(), t.dims());
    EXPECT_EQ(EncodeTensor(back), bytes);
  }
}

TEST(TensorFileTest, DistinctErrorCodes) {
  const auto good = EncodeTensor(Tensor({2, 2}, std::vector<float>(4, 1.0f)));

  auto bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_EQ(DecodeError(bad_magic), ErrorCode::kBadMagic);

  auto bad_version = good;
  bad_version[4] = 9;
  EXPECT_EQ(DecodeError(bad_version), ErrorCode::kBadVersion);

  auto bad_dtype = good;
  bad_dtype[8] = 3;
  EXPECT_EQ(DecodeError(bad_dtype), ErrorCode::kBadDtype);

  auto short_payload = good;
  short_payload.pop_back();
  EXPECT_EQ(DecodeError(short_payload), ErrorCode::kShortPayload);

  auto trailing = good;
  trailing.push_back(0);
  EXPECT_EQ(DecodeError(trailing), ErrorCode::kParse);

  auto zero_dim = EncodeTensor(Tensor({1, 1}, std::vector<float>{1.0f}));
  std::memset(zero_dim.data() + 13, 0, 8);
  EXPECT_EQ(DecodeError(zero_dim), ErrorCode::kParse);
}

TEST(TensorFileTest, TruncatedFileMessage) {
  testing::TempDir dir;
  auto bytes = EncodeTensor(Tensor({4}, std::vector<float>(4, 2.0f)));
  bytes.resize(bytes.size() - 3);
  std::ofstream(dir / "t.etns", std::ios::binary)
      .write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  try {
    ReadTensor(dir / "t.etns");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShortPayload);
    EXPECT_NE(std::string(e.what()).find("short payload"), std::string::npos);
  }
  EXPECT_THROW(ReadTensor(dir / "missing.etns"), Error);
}

TEST(TensorFileTest, ConstructionRejectsMismatch) {
  EXPECT_THROW(Tensor({2, 2}, std::vector<float>(3)), Error);
  EXPECT_THROW(Tensor({0, 2}, std::vector<float>{}), Error);
  const Tensor t({2}, std::vector<float>{1, 2});
  EXPECT_THROW(t.u8(), Error);
}

TEST(TensorFileTest, GridAndImageConversions) {
  Grid<float> g(3, 2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 3; ++x) g.at(x, y) = x + 10.0f * y;
  const Tensor t = GridToTensor(g);
  EXPECT_EQ(t.dims(), (std::vector<uint64_t>{2, 3}));
  EXPECT_EQ(t.f32()[1 * 3 + 2], 12.0f);
  EXPECT_TRUE(TensorToGrid(t) == g);

  RgbImage img(2, 2);
  img.at(1, 0) = {1, 2, 3};
  const Tensor ti = ImageToTensor(img);
  EXPECT_EQ(ti.dims(), (std::vector<uint64_t>{2, 2, 3}));
  EXPECT_EQ(ti.u8()[3 + 2], 3);
  EXPECT_TRUE(TensorToImage(ti) == img);
}

}  // namespace
}  // namespace eval3d

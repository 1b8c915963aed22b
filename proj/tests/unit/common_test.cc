#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>

#include "eval3d/common/error.h"
#include "eval3d/common/grid.h"
#include "eval3d/common/parallel.h"
#include "eval3d/common/png_io.h"
#include "test_support.h"

namespace eval3d {
namespace {

TEST(GridTest, RowMajorIndexing) {
  Grid<int> g(3, 2, 0);
  g.at(2, 1) = 7;
  EXPECT_EQ(g.data()[1 * 3 + 2], 7);
  EXPECT_TRUE(g.InBounds(2, 1));
  EXPECT_FALSE(g.InBounds(3, 0));
  EXPECT_FALSE(g.InBounds(0, -1));
}

TEST(PngTest, RgbRoundTripIsExact) {
  testing::TempDir dir;
  RgbImage img(5, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 5; ++x) {
      img.at(x, y) = {static_cast<unsigned char>(x * 50),
                      static_cast<unsigned char>(y * 60),
                      static_cast<unsigned char>(x + y)};
    }
  }
  WritePngRgb(dir / "a.png", img);
  EXPECT_EQ(ReadPngRgb(dir / "a.png"), img);
}

TEST(PngTest, MissingFileIsIoError) {
  try {
    ReadPngRgb("/nonexistent/x.png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(ParallelForTest, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  ParallelFor(hits.size(), [&](size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelForTest, RethrowsWorkerException) {
  EXPECT_THROW(ParallelFor(10,
                           [](size_t i) {
                             if (i == 3) throw std::runtime_error("boom");
                           }),
               std::runtime_error);
}

TEST(ErrorTest, CodesHaveNames) {
  EXPECT_STREQ(ErrorCodeName(ErrorCode::kShortPayload), "short_payload");
  const Error e(ErrorCode::kBadMagic, "x");
  EXPECT_EQ(e.code(), ErrorCode::kBadMagic);
}

}  // namespace
}  // namespace eval3d

#include <gtest/gtest.h>

#include "eval3d/common/error.h"
#include "eval3d/metrics/alignment.h"

namespace eval3d {
namespace {

const QAItem kCat{"Is there a cat?", {"Yes", "No"}, "Yes"};
const QAItem kColor{"What color is the cat?", {"black", "white", "orange"}, "orange"};

std::vector<std::optional<std::string>> Row(const QAItem& q, uint32_t correct_mask, int n) {
  std::vector<std::optional<std::string>> row(n);
  for (int v = 0; v < n; ++v) {
    row[v] = (correct_mask >> v) & 1 ? q.gold
                                     : (q.gold == q.choices[0] ? q.choices[1] : q.choices[0]);
  }
  return row;
}

// Brute force over every window center.
bool OraclePass(uint32_t mask, int n, int radius) {
  for (int c = 0; c < n; ++c) {
    bool all = true;
    for (int d = -radius; d <= radius; ++d) all = all && ((mask >> (((c + d) % n + n) % n)) & 1);
    if (all) return true;
  }
  return false;
}

TEST(AlignmentTest, AllGoldIsHundred) {
  const AlignResult r = TextAlignment({kCat, kColor},
                                      {Row(kCat, 0xfff, 12), Row(kColor, 0xfff, 12)}, {});
  EXPECT_DOUBLE_EQ(r.score.value, 100.0);
  EXPECT_EQ(r.score.name, "align");
}

TEST(AlignmentTest, IsolatedCorrectViewFails) {
  const AlignResult r = TextAlignment(
      {kCat, kColor}, {Row(kCat, 1u << 6, 12), Row(kColor, 0xfff, 12)}, {});
  EXPECT_DOUBLE_EQ(r.score.value, 50.0);
  EXPECT_EQ(r.passed, (std::vector<uint8_t>{0, 1}));
  EXPECT_EQ(r.correct[0][6], 1);
  EXPECT_EQ(r.correct[0][5], 0);
}

TEST(AlignmentTest, ContiguousArcPasses) {
  const AlignResult r = TextAlignment({kCat}, {Row(kCat, 0b111u << 4, 12)}, {});
  EXPECT_DOUBLE_EQ(r.score.value, 100.0);
}

TEST(AlignmentTest, ArcWrapsAround) {
  const uint32_t mask = (1u << 11) | 1u | (1u << 1);
  EXPECT_DOUBLE_EQ(TextAlignment({kCat}, {Row(kCat, mask, 12)}, {}).score.value, 100.0);
}

TEST(AlignmentTest, TruthTableOverAllPatterns) {
  for (int radius : {0, 1, 2}) {
    AlignConfig cfg;
    cfg.adjacency_radius = radius;
    for (uint32_t mask = 0; mask < (1u << 12); ++mask) {
      const AlignResult r = TextAlignment({kColor}, {Row(kColor, mask, 12)}, cfg);
      ASSERT_EQ(r.passed[0] != 0, OraclePass(mask, 12, radius))
          << "mask=" << mask << " radius=" << radius;
      if (radius == 0) ASSERT_EQ(r.passed[0] != 0, mask != 0);
    }
  }
}

TEST(AlignmentTest, MissingAnswersNeverMatch) {
  auto row = Row(kCat, 0xfff, 12);
  for (int v = 0; v < 12; v += 2) row[v] = std::nullopt;
  EXPECT_DOUBLE_EQ(TextAlignment({kCat}, {row}, {}).score.value, 0.0);
}

TEST(AlignmentTest, ErrorsOnBadShapes) {
  EXPECT_THROW(TextAlignment({}, {}, {}), Error);
  EXPECT_THROW(TextAlignment({kCat}, {Row(kCat, 1, 11)}, {}), Error);
  AlignConfig cfg;
  cfg.n_views = 2;
  EXPECT_THROW(ValidateAlignConfig(cfg), Error);
}

}  // namespace
}  // namespace eval3d

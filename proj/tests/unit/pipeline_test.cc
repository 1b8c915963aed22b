#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "eval3d/assets/mesh_io.h"
#include "eval3d/assets/primitives.h"
#include "eval3d/common/error.h"
#include "eval3d/metrics/geometric.h"
#include "eval3d/pipeline/compare.h"
#include "eval3d/pipeline/run_config.h"
#include "eval3d/pipeline/run_eval.h"
#include "test_support.h"

namespace eval3d {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::TempDir;

json StubConfig(const std::string& prompt) {
  json backends = json::object();
  for (const char* k : {"depth", "features", "nvs", "perceptual", "qagen", "vqa",
                        "aesthetic"}) {
    backends[k] = "stub";
  }
  return {{"mesh", "sphere.obj"},
          {"prompt", prompt},
          {"prompt_id", prompt},
          {"rig", {{"n_views", 12}, {"resolution", 128}}},
          {"metrics", {{"sem", {{"delta_dino", 0.01}}}}},
          {"allow_proxy_rgb", true},
          {"backends", backends}};
}

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override { WriteObj(dir / "sphere.obj", testing::UnitSphere(3)); }

  RunConfig Parse(json j, const std::string& out) {
    j["output_dir"] = out;
    return ParseRunConfig(j, dir.path());
  }

  TempDir dir;
};

TEST_F(PipelineTest, StubRunScoresEveryMetric) {
  const RunOutcome r = RunEval(Parse(StubConfig("a red ball"), "out"));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.report["status"], "complete");
  EXPECT_EQ(r.report["format"], kReportFormat);
  ASSERT_TRUE(r.scores.at("geo"));
  EXPECT_GE(*r.scores.at("geo"), 98.0);
  EXPECT_DOUBLE_EQ(*r.scores.at("sem"), 100.0);
  EXPECT_DOUBLE_EQ(*r.scores.at("struct"), 100.0);
  EXPECT_DOUBLE_EQ(*r.scores.at("align"), 100.0);
  // Constant raw score 1 on the [-2, 2] calibration.
  EXPECT_DOUBLE_EQ(*r.scores.at("aes"), 75.0);
  EXPECT_DOUBLE_EQ(r.report["metrics"]["aes"]["value"].get<double>(), 75.0);
  EXPECT_EQ(r.report["backends"]["aesthetic"]["reported"]["name"],
            "stub:aesthetic:default");
}

TEST_F(PipelineTest, ArtifactInventoryMatchesDisk) {
  const RunOutcome r = RunEval(Parse(StubConfig("p"), "out"));
  const fs::path out = dir / "out";
  ASSERT_TRUE(fs::exists(out / "report.json"));
  std::ifstream in(out / "report.json");
  EXPECT_EQ(json::parse(in), r.report);
  std::set<std::string> listed;
  for (const json& a : r.report["artifacts"]) {
    const std::string rel = a["path"];
    listed.insert(rel);
    ASSERT_TRUE(fs::exists(out / rel)) << rel;
    EXPECT_EQ(fs::file_size(out / rel), a["bytes"].get<uint64_t>()) << rel;
  }
  for (const char* rel :
       {"rig.json", "heatmaps/geo_mean.ply", "heatmaps/geo_max.ply",
        "heatmaps/sem_variance.ply", "heatmaps/sem_outliers.ply",
        "summary/normals.png", "evidence/aes_per_view.etns",
        "evidence/struct_distances.etns", "evidence/align_correct.etns"}) {
    EXPECT_TRUE(listed.count(rel)) << rel;
  }
  EXPECT_FALSE(fs::exists(out / "jobs"));
}

TEST_F(PipelineTest, RepeatedRunsAreIdenticalWithoutTimings) {
  const RunOutcome a = RunEval(Parse(StubConfig("p"), "a"));
  const RunOutcome b = RunEval(Parse(StubConfig("p"), "b"));
  EXPECT_TRUE(a.report.contains("timings"));
  EXPECT_EQ(StripTimings(a.report), StripTimings(b.report));
  EXPECT_FALSE(StripTimings(a.report).contains("timings"));
}

TEST_F(PipelineTest, MissingBackendSkipsOnlyItsMetric) {
  json j = StubConfig("p");
  j["backends"].erase("depth");
  const RunOutcome r = RunEval(Parse(j, "out"));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(r.report["status"], "partial");
  EXPECT_EQ(r.report["metrics"]["geo"], "skipped: no depth backend");
  EXPECT_FALSE(r.scores.at("geo"));
  for (const char* m : {"sem", "struct", "align", "aes"}) {
    EXPECT_TRUE(r.scores.at(m)) << m;
  }
}

TEST_F(PipelineTest, MetricSubset) {
  RunConfig c = Parse(StubConfig("p"), "out");
  RunOverrides o;
  o.metrics = std::vector<std::string>{"aes"};
  ApplyOverrides(c, o);
  const RunOutcome r = RunEval(c);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.report["status"], "complete");
  for (const char* m : {"geo", "sem", "struct", "align"}) {
    EXPECT_EQ(r.report["metrics"][m], "skipped: not requested") << m;
  }
  EXPECT_DOUBLE_EQ(*r.scores.at("aes"), 75.0);
}

TEST_F(PipelineTest, BackendFailureBecomesSkippedSlot) {
  json j = StubConfig("p");
  j["backends"]["aesthetic"] = {{"stub", {{"mode", "per_view"}, {"values", json::object()}}}};
  const RunOutcome r = RunEval(Parse(j, "out"));
  EXPECT_EQ(r.exit_code, 2);
  const std::string slot = r.report["metrics"]["aes"];
  EXPECT_EQ(slot.rfind("skipped: aes/", 0), 0u) << slot;
  EXPECT_NE(slot.find("stub lookup miss"), std::string::npos) << slot;
}

TEST_F(PipelineTest, MissingMeshFailsRun) {
  json j = StubConfig("p");
  j["mesh"] = "absent.obj";
  const RunOutcome r = RunEval(Parse(j, "out"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.report["status"], "failed");
  const std::string slot = r.report["metrics"]["geo"];
  EXPECT_EQ(slot.rfind("skipped: load mesh", 0), 0u) << slot;
  EXPECT_TRUE(fs::exists(dir / "out" / "report.json"));
}

TEST_F(PipelineTest, NoRgbSourceSkipsRgbMetrics) {
  json j = StubConfig("p");
  j["allow_proxy_rgb"] = false;
  const RunOutcome r = RunEval(Parse(j, "out"));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_FALSE(r.scores.at("aes"));
  EXPECT_FALSE(FrontViewImage(Parse(j, "out")));
}

TEST_F(PipelineTest, StubAllOverride) {
  json j = {{"mesh", "sphere.obj"},
            {"prompt", "p"},
            {"rig", {{"n_views", 4}, {"resolution", 64}}}};
  RunConfig c = Parse(j, "out");
  EXPECT_FALSE(c.metrics.sem.delta_dino);
  RunOverrides o;
  o.stub_all = true;
  o.views = 6;
  ApplyOverrides(c, o);
  EXPECT_TRUE(c.allow_proxy_rgb);
  EXPECT_EQ(c.rig.n_views, 6);
  EXPECT_DOUBLE_EQ(*c.metrics.sem.delta_dino, kStubDeltaDino);
  for (BackendKind k : AllKinds()) EXPECT_TRUE(c.backends.Has(k));
  o.views = 0;
  EXPECT_THROW(ApplyOverrides(c, o), Error);
}

TEST(RunConfigTest, ParseErrorsNameTheField) {
  auto message = [](const json& j) -> std::string {
    try {
      ParseRunConfig(j, "/tmp");
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParse);
      return e.what();
    }
    return "";
  };
  EXPECT_NE(message(json::object()).find("'mesh'"), std::string::npos);
  EXPECT_NE(message({{"mesh", "m.obj"}, {"rig", {{"n_views", 0}}}}).find("rig.n_views"),
            std::string::npos);
  EXPECT_NE(message({{"mesh", "m.obj"}, {"rig", {{"distance", 1.5}}}}).find("rig.distance"),
            std::string::npos);
  EXPECT_NE(message({{"mesh", "m.obj"}, {"metrics", {{"enabled", {"geo", "vibes"}}}}})
                .find("unknown metric 'vibes'"),
            std::string::npos);
  EXPECT_NE(message({{"mesh", "m.obj"}, {"backends", {{"oracle", "stub"}}}})
                .find("unknown backend kind 'oracle'"),
            std::string::npos);
  EXPECT_NE(message({{"mesh", "m.obj"}, {"backends", {{"depth", {{"command", json::array()}}}}}})
                .find("backends.depth.command"),
            std::string::npos);
  EXPECT_NE(message({{"mesh", "m.obj"}, {"heat_ranges", {{"geo", {1.0, 0.0}}}}})
                .find("heat_ranges.geo"),
            std::string::npos);
  EXPECT_NE(message({{"mesh", "m.obj"}, {"metrics", {{"geo", {{"pooling", "median"}}}}}})
                .find("metrics.geo.pooling"),
            std::string::npos);
}

TEST(RunConfigTest, ResolvesPathsAndDefaults) {
  const RunConfig c = ParseRunConfig(
      {{"mesh", "m.obj"},
       {"prompt", "a chair"},
       {"backends", {{"depth", {{"command", {"python3", "d.py"}}, {"timeout_s", 7}}}}}},
      "/data/run");
  EXPECT_EQ(c.mesh, fs::path("/data/run/m.obj"));
  EXPECT_EQ(c.prompt_id, "a chair");
  EXPECT_EQ(c.rig.n_views, 120);
  EXPECT_EQ(c.rig.resolution, 512);
  EXPECT_DOUBLE_EQ(c.metrics.geo.delta_norm_deg, 23.0);
  EXPECT_EQ(c.metrics.enabled.size(), 5u);
  ASSERT_TRUE(c.backends.Has(BackendKind::kDepth));
  EXPECT_EQ(c.backends.Get(BackendKind::kDepth).command,
            (std::vector<std::string>{"python3", "d.py"}));
  EXPECT_EQ(c.backends.Get(BackendKind::kDepth).timeout, std::chrono::seconds(7));
  EXPECT_FALSE(c.backends.Has(BackendKind::kVqa));
  EXPECT_EQ(RunConfigToJson(c)["mesh"], "m.obj");
}

class CompareTest : public PipelineTest {
 protected:
  CompareManifest Manifest(const std::vector<std::string>& models) {
    CompareManifest m;
    m.output_dir = dir / "cmp";
    for (const std::string& model : models) {
      for (const char* prompt : {"p1", "p2"}) {
        json j = StubConfig(prompt);
        j["rig"] = {{"n_views", 12}, {"resolution", 64}};
        j["metrics"]["enabled"] = {"aes"};
        j["model_id"] = model;
        m.models[model].push_back(Parse(j, "unused"));
      }
    }
    return m;
  }
};

TEST_F(CompareTest, PairwiseJudgeRanksModels) {
  CompareManifest m = Manifest({"A", "B", "C"});
  m.judge = ParseBackendSpec(
      BackendKind::kPairwise,
      {{"stub", {{"mode", "rank"}, {"ranks", {{"A", 0}, {"B", 1}, {"C", 2}}}}}},
      dir.path());
  const Leaderboard board = CompareModels(m);
  ASSERT_TRUE(board.elo);
  const auto& elo = board.elo->normalized;
  EXPECT_GT(elo.at("A"), elo.at("B"));
  EXPECT_GT(elo.at("B"), elo.at("C"));
  EXPECT_DOUBLE_EQ(elo.at("A"), 100.0);
  EXPECT_DOUBLE_EQ(elo.at("C"), 0.0);
  ASSERT_EQ(board.rows.size(), 3u);
  EXPECT_EQ(board.rows[0].model, "A");
  EXPECT_DOUBLE_EQ(*board.rows[0].means.at("aes"), 100.0);
  EXPECT_EQ(board.rows[0].prompts, 2u);

  std::ifstream in(dir / "cmp" / "leaderboard.json");
  const json written = json::parse(in);
  EXPECT_EQ(written["aes_source"], "elo");
  EXPECT_DOUBLE_EQ(written["models"]["C"]["aes"].get<double>(), 0.0);
  EXPECT_FALSE(fs::exists(dir / "cmp" / "jobs"));
}

TEST_F(CompareTest, DefaultStubJudgeTiesEveryPair) {
  CompareManifest m = Manifest({"A", "B"});
  m.judge = ParseBackendSpec(BackendKind::kPairwise, "stub", dir.path());
  const Leaderboard board = CompareModels(m);
  ASSERT_TRUE(board.elo);
  EXPECT_DOUBLE_EQ(board.elo->elo.at("A"), board.elo->elo.at("B"));
  EXPECT_EQ(board.rows[0].means.at("aes"), board.rows[1].means.at("aes"));
}

TEST_F(CompareTest, IdenticalModelsGetIdenticalRows) {
  const Leaderboard board = CompareModels(Manifest({"X", "Y"}));
  ASSERT_EQ(board.rows.size(), 2u);
  EXPECT_EQ(board.rows[0].means, board.rows[1].means);
  EXPECT_DOUBLE_EQ(*board.rows[0].means.at("aes"), 75.0);
  EXPECT_FALSE(board.rows[0].means.at("geo"));
  EXPECT_FALSE(board.elo);
}

TEST_F(CompareTest, MismatchedPromptsThrow) {
  CompareManifest m = Manifest({"A", "B"});
  m.models["B"].pop_back();
  try {
    CompareModels(m);
    FAIL() << "expected mismatched prompt sets";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("mismatched prompt sets"), std::string::npos);
  }
}

TEST_F(CompareTest, SingleModelThrows) {
  EXPECT_THROW(CompareModels(Manifest({"A"})), Error);
}

// Predicted normals 10 degrees off for model A and 40 degrees off for B on
// the same analytic maps; at the default threshold A keeps every pixel.
TEST(LeaderboardTest, GeometricOrderFollowsNormalError) {
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  Grid<Eigen::Vector3f> analytic(16, 16);
  for (auto& n : analytic.pixels()) {
    n = Eigen::Vector3d(g(rng), g(rng), std::abs(g(rng)) + 0.2).normalized().cast<float>();
  }
  auto rotated = [&](double deg) {
    Grid<Eigen::Vector3f> out(16, 16);
    for (size_t i = 0; i < out.size(); ++i) {
      out.data()[i] = testing::RotatePerpendicular(
                          analytic.data()[i].cast<double>(), deg).cast<float>();
    }
    return out;
  };
  const Grid<uint8_t> mask(16, 16, 1);
  const GeoConfig cfg;
  ScoreTable table;
  for (const auto& [model, deg] : {std::pair{"A", 10.0}, std::pair{"B", 40.0}}) {
    const std::vector<Grid<Eigen::Vector3f>> a{analytic}, p{rotated(deg)};
    const std::vector<Grid<uint8_t>> m{mask};
    table[model]["p"]["geo"] = GeometricConsistency(a, p, m, cfg).score.value;
  }
  const Leaderboard board = BuildLeaderboard(table, nullptr);
  EXPECT_DOUBLE_EQ(*board.rows[0].means.at("geo"), 100.0);
  EXPECT_DOUBLE_EQ(*board.rows[1].means.at("geo"), 0.0);
  EXPECT_FALSE(board.rows[0].means.at("sem"));
  EXPECT_EQ(board.ToJson()["aes_source"], "mean");
  EXPECT_NE(board.ToText().find("100.0"), std::string::npos);
}

TEST(LeaderboardTest, MeansSkipMissingValues) {
  ScoreTable t;
  t["A"]["p1"]["sem"] = 80.0;
  t["A"]["p2"]["sem"] = std::nullopt;
  t["B"]["p1"]["sem"] = 40.0;
  t["B"]["p2"]["sem"] = 60.0;
  const Leaderboard board = BuildLeaderboard(t, nullptr);
  EXPECT_DOUBLE_EQ(*board.rows[0].means.at("sem"), 80.0);
  EXPECT_DOUBLE_EQ(*board.rows[1].means.at("sem"), 50.0);
}

}  // namespace
}  // namespace eval3d

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eval3d/metrics/aesthetic.h"
#include "eval3d/pipeline/run_config.h"

namespace eval3d {

// {"models": {"<model>": ["<run config>", ...]}, "judge": <backend entry>,
//  "output_dir": "...", "stub_all": false}
struct CompareManifest {
  std::map<std::string, std::vector<RunConfig>> models;
  std::optional<BackendSpec> judge;
  std::filesystem::path output_dir = "eval3d_compare";
  bool stub_all = false;
};

CompareManifest ParseCompareManifest(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir);
CompareManifest LoadCompareManifest(const std::filesystem::path& path);

// model -> prompt id -> metric -> value (nullopt when skipped)
using ScoreTable =
    std::map<std::string,
             std::map<std::string, std::map<std::string, std::optional<double>>>>;

struct LeaderboardRow {
  std::string model;
  std::map<std::string, std::optional<double>> means;
  size_t prompts = 0;
};

struct Leaderboard {
  std::vector<LeaderboardRow> rows;  // sorted by model id
  std::optional<EloResult> elo;      // set when a judge was used
  bool partial = false;

  nlohmann::json ToJson() const;
  std::string ToText() const;
};

// Throws kInvalidArgument ("mismatched prompt sets") unless every model
// covers the same prompt ids.
void CheckSharedPrompts(const ScoreTable& scores);

// Per-model means over prompts with a value. When judge outcomes are
// given, the aesthetic column holds normalized Bradley-Terry ELO instead.
Leaderboard BuildLeaderboard(const ScoreTable& scores,
                             const std::vector<PairOutcome>* judge_outcomes);

// Runs every config, then the judge over all model pairs per prompt, and
// writes leaderboard.json under output_dir. Needs >= 2 models.
Leaderboard CompareModels(const CompareManifest& manifest);

}  // namespace eval3d

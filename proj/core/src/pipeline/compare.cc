#include "eval3d/pipeline/compare.h"

#include <cctype>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "eval3d/backends/client.h"
#include "eval3d/common/error.h"
#include "eval3d/pipeline/run_eval.h"

namespace eval3d {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string SafeName(const std::string& s) {
  std::string out;
  for (char c : s) {
    out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_';
  }
  if (out.size() > 48) out.resize(48);
  return out.empty() ? "prompt" : out;
}

}  // namespace

CompareManifest ParseCompareManifest(const json& j, const fs::path& base_dir) {
  if (!j.is_object() || !j.contains("models") || !j.at("models").is_object()) {
    throw Error(ErrorCode::kParse, "manifest needs a \"models\" object");
  }
  CompareManifest m;
  m.stub_all = j.value("stub_all", false);
  if (j.contains("output_dir")) {
    const fs::path p = j.at("output_dir").get<std::string>();
    m.output_dir = p.is_absolute() ? p : base_dir / p;
  } else {
    m.output_dir = base_dir / m.output_dir;
  }
  for (const auto& [model, configs] : j.at("models").items()) {
    if (!configs.is_array() || configs.empty()) {
      throw Error(ErrorCode::kParse,
                  "model '" + model + "' needs a non-empty list of configs");
    }
    for (const json& c : configs) {
      const fs::path p = c.get<std::string>();
      RunConfig rc = LoadRunConfig(p.is_absolute() ? p : base_dir / p);
      if (rc.model_id.empty()) rc.model_id = model;
      m.models[model].push_back(std::move(rc));
    }
  }
  if (j.contains("judge") && !j.at("judge").is_null()) {
    m.judge = ParseBackendSpec(BackendKind::kPairwise, j.at("judge"), base_dir);
  }
  return m;
}

CompareManifest LoadCompareManifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open manifest " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("manifest is not valid JSON: ") + e.what());
  }
  return ParseCompareManifest(j, fs::absolute(path).parent_path());
}

void CheckSharedPrompts(const ScoreTable& scores) {
  if (scores.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "compare needs at least two models");
  }
  std::set<std::string> reference;
  for (const auto& [prompt, _] : scores.begin()->second) reference.insert(prompt);
  for (const auto& [model, prompts] : scores) {
    std::set<std::string> ids;
    for (const auto& [prompt, _] : prompts) ids.insert(prompt);
    if (ids != reference) {
      throw Error(ErrorCode::kInvalidArgument,
                  "mismatched prompt sets: '" + model + "' differs from '" +
                      scores.begin()->first + "'");
    }
  }
}

Leaderboard BuildLeaderboard(const ScoreTable& scores,
                             const std::vector<PairOutcome>* judge_outcomes) {
  CheckSharedPrompts(scores);
  Leaderboard board;
  if (judge_outcomes) board.elo = AestheticElo(*judge_outcomes);
  for (const auto& [model, prompts] : scores) {
    LeaderboardRow row;
    row.model = model;
    row.prompts = prompts.size();
    for (const std::string& metric : kMetricNames) {
      double sum = 0.0;
      size_t n = 0;
      for (const auto& [prompt, values] : prompts) {
        auto it = values.find(metric);
        if (it == values.end() || !it->second) continue;
        sum += *it->second;
        ++n;
      }
      row.means[metric] = n ? std::optional<double>(sum / n) : std::nullopt;
    }
    if (board.elo) {
      auto it = board.elo->normalized.find(model);
      row.means["aes"] = it == board.elo->normalized.end()
                             ? std::nullopt
                             : std::optional<double>(it->second);
    }
    board.rows.push_back(std::move(row));
  }
  return board;
}

json Leaderboard::ToJson() const {
  json models = json::object();
  for (const LeaderboardRow& row : rows) {
    json m = {{"prompts", row.prompts}};
    for (const auto& [metric, v] : row.means) m[metric] = v ? json(*v) : json(nullptr);
    models[row.model] = m;
  }
  json out = {{"models", models},
              {"aes_source", elo ? "elo" : "mean"},
              {"partial", partial}};
  if (elo) {
    out["elo"] = {{"elo", elo->elo},
                  {"normalized", elo->normalized},
                  {"regularized", elo->regularized}};
  }
  return out;
}

std::string Leaderboard::ToText() const {
  std::ostringstream os;
  os << std::left << std::setw(16) << "model";
  for (const std::string& m : kMetricNames) os << std::right << std::setw(9) << m;
  os << "\n";
  for (const LeaderboardRow& row : rows) {
    os << std::left << std::setw(16) << row.model;
    for (const std::string& m : kMetricNames) {
      auto it = row.means.find(m);
      os << std::right << std::setw(9);
      if (it != row.means.end() && it->second) {
        os << std::fixed << std::setprecision(1) << *it->second;
      } else {
        os << "-";
      }
    }
    os << "\n";
  }
  if (elo) os << "(aes column: normalized pairwise ELO)\n";
  return os.str();
}

Leaderboard CompareModels(const CompareManifest& manifest) {
  ScoreTable scores;
  std::map<std::string, std::map<std::string, const RunConfig*>> by_prompt;
  bool partial = false;
  for (const auto& [model, configs] : manifest.models) {
    size_t index = 0;
    for (const RunConfig& base : configs) {
      RunConfig config = base;
      RunOverrides o;
      o.stub_all = manifest.stub_all;
      o.output_dir = manifest.output_dir / SafeName(model) /
                     (std::to_string(index++) + "_" + SafeName(config.prompt_id));
      ApplyOverrides(config, o);
      if (scores[model].count(config.prompt_id)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "model '" + model + "' lists prompt '" + config.prompt_id +
                        "' twice");
      }
      const RunOutcome r = RunEval(config);
      if (r.exit_code == 1) {
        throw Error(ErrorCode::kInvalidArgument,
                    "run for model '" + model + "', prompt '" + config.prompt_id +
                        "' failed; see " + (*o.output_dir / "report.json").string());
      }
      partial = partial || r.exit_code != 0;
      scores[model][config.prompt_id] = r.scores;
      by_prompt[config.prompt_id][model] = &base;
    }
  }
  CheckSharedPrompts(scores);
  std::optional<std::vector<PairOutcome>> outcomes;
  if (manifest.judge) {
    BackendSpec judge = *manifest.judge;
    judge.work_root = manifest.output_dir / "jobs";
    outcomes.emplace();
    for (const auto& [prompt, models] : by_prompt) {
      std::map<std::string, RgbImage> images;
      for (const auto& [model, cfg] : models) {
        RunConfig c = *cfg;
        if (manifest.stub_all) c.allow_proxy_rgb = true;
        std::optional<RgbImage> img = FrontViewImage(c);
        if (!img) {
          throw Error(ErrorCode::kInvalidArgument,
                      "pairwise judge needs RGB views for model '" + model + "'");
        }
        images.emplace(model, std::move(*img));
      }
      for (auto a = models.begin(); a != models.end(); ++a) {
        for (auto b = std::next(a); b != models.end(); ++b) {
          const PairWinner w =
              JudgePair(judge, images.at(a->first), images.at(b->first),
                        a->first, b->first, a->second->prompt);
          outcomes->push_back(
              {a->first, b->first,
               w == PairWinner::kA   ? Outcome::kAWins
               : w == PairWinner::kB ? Outcome::kBWins
                                     : Outcome::kTie});
        }
      }
    }
    std::error_code ec;
    fs::remove(manifest.output_dir / "jobs", ec);
  }
  Leaderboard board =
      BuildLeaderboard(scores, outcomes ? &*outcomes : nullptr);
  board.partial = partial;
  fs::create_directories(manifest.output_dir);
  std::ofstream(manifest.output_dir / "leaderboard.json")
      << board.ToJson().dump(2) << "\n";
  return board;
}

}  // namespace eval3d

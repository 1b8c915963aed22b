#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace eval3d {

enum class PromptCategory { kSingleObject, kMultiObject };
enum class ElementKind {
  kEntityWhole,
  kEntityPart,
  kAttribute,
  kRelation,
  kAction,
  kOther
};

const char* CategoryName(PromptCategory c);
const char* ElementKindName(ElementKind k);

struct SceneElement {
  ElementKind kind = ElementKind::kOther;
  std::string text;
};

struct PromptRecord {
  std::string id;
  std::string text;
  PromptCategory category = PromptCategory::kSingleObject;
  std::vector<SceneElement> scene_graph;
  std::optional<std::string> image_path;
};

struct PromptSet {
  std::vector<PromptRecord> records;
  std::vector<std::string> warnings;

  size_t CountCategory(PromptCategory c) const;
};

// JSON lines, one record per line; blank lines are skipped. Schema
// violations throw kParse with "line N: ...". An empty file yields an empty
// set with a warning.
PromptSet ParsePromptSet(std::istream& in);
PromptSet LoadPromptSet(const std::filesystem::path& path);

nlohmann::json SceneGraphToJson(const std::vector<SceneElement>& graph);
nlohmann::json PromptRecordToJson(const PromptRecord& record);

// Human judgement labels for yes/no metrics.
enum class HumanLabel { kYes, kUncertainYes, kUncertainNo, kNo };

enum class AlignAnswer { kYes, kNo, kUnreasonable };

// Payload per metric: geo and aes carry a 0-9 rank (higher is better), sem
// and struct a label, align per-question answers.
using AnnotationPayload =
    std::variant<int, HumanLabel, std::vector<AlignAnswer>>;

struct AnnotationRecord {
  std::string prompt_id;
  std::string model_id;
  std::string metric;
  AnnotationPayload payload;
};

std::vector<AnnotationRecord> ParseAnnotations(std::istream& in);
std::vector<AnnotationRecord> LoadAnnotations(const std::filesystem::path& path);

struct ScoreRecord {
  std::string prompt_id;
  std::string model_id;
  std::string metric;
  double score = 0.0;
};

std::vector<ScoreRecord> ParseScores(std::istream& in);
std::vector<ScoreRecord> LoadScores(const std::filesystem::path& path);

// True for "geo", "sem", "struct", "align", "aes".
bool IsMetricName(const std::string& name);

}  // namespace eval3d

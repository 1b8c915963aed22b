#include "eval3d/bench/promptset.h"

#include <fstream>
#include <functional>
#include <iostream>

#include "eval3d/common/error.h"

namespace eval3d {
namespace {

using nlohmann::json;

[[noreturn]] void LineError(size_t line, const std::string& msg) {
  throw Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + msg);
}

// Calls fn(json, line) for each non-blank line.
size_t ForEachJsonLine(std::istream& in,
                       const std::function<void(const json&, size_t)>& fn) {
  std::string text;
  size_t line = 0, records = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      LineError(line, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) LineError(line, "record must be a JSON object");
    try {
      fn(j, line);
    } catch (const json::exception& e) {
      LineError(line, e.what());
    }
    ++records;
  }
  return records;
}

std::string IdField(const json& j, const char* key, size_t line) {
  if (!j.contains(key)) LineError(line, std::string("missing \"") + key + "\"");
  const json& v = j.at(key);
  if (v.is_string() && !v.get<std::string>().empty()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  LineError(line, std::string("\"") + key + "\" must be a string or integer");
}

std::string StringField(const json& j, const char* key, size_t line) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    LineError(line, std::string("\"") + key + "\" must be a string");
  }
  return j.at(key).get<std::string>();
}

std::ifstream OpenOrThrow(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

}  // namespace

const char* CategoryName(PromptCategory c) {
  return c == PromptCategory::kSingleObject ? "single-object" : "multi-object";
}

const char* ElementKindName(ElementKind k) {
  switch (k) {
    case ElementKind::kEntityWhole: return "entity-whole";
    case ElementKind::kEntityPart: return "entity-part";
    case ElementKind::kAttribute: return "attribute";
    case ElementKind::kRelation: return "relation";
    case ElementKind::kAction: return "action";
    case ElementKind::kOther: return "other";
  }
  return "other";
}

size_t PromptSet::CountCategory(PromptCategory c) const {
  size_t n = 0;
  for (const PromptRecord& r : records) n += r.category == c;
  return n;
}

PromptSet ParsePromptSet(std::istream& in) {
  PromptSet set;
  ForEachJsonLine(in, [&](const json& j, size_t line) {
    PromptRecord r;
    r.id = IdField(j, "id", line);
    r.text = StringField(j, "text", line);
    if (r.text.empty()) LineError(line, "empty prompt text");
    const std::string cat = StringField(j, "category", line);
    if (cat == "single-object") {
      r.category = PromptCategory::kSingleObject;
    } else if (cat == "multi-object") {
      r.category = PromptCategory::kMultiObject;
    } else {
      LineError(line, "unknown category \"" + cat + "\"");
    }
    if (j.contains("scene_graph")) {
      if (!j.at("scene_graph").is_array()) {
        LineError(line, "\"scene_graph\" must be an array");
      }
      for (const json& e : j.at("scene_graph")) {
        if (!e.is_object()) LineError(line, "scene graph element must be an object");
        const std::string kind = StringField(e, "kind", line);
        SceneElement el;
        bool known = false;
        for (ElementKind k :
             {ElementKind::kEntityWhole, ElementKind::kEntityPart,
              ElementKind::kAttribute, ElementKind::kRelation,
              ElementKind::kAction, ElementKind::kOther}) {
          if (kind == ElementKindName(k)) {
            el.kind = k;
            known = true;
          }
        }
        if (!known) LineError(line, "unknown element kind \"" + kind + "\"");
        el.text = StringField(e, "text", line);
        r.scene_graph.push_back(std::move(el));
      }
    }
    if (j.contains("image_path") && !j.at("image_path").is_null()) {
      r.image_path = StringField(j, "image_path", line);
    }
    for (const PromptRecord& prev : set.records) {
      if (prev.id == r.id) LineError(line, "duplicate prompt id \"" + r.id + "\"");
    }
    set.records.push_back(std::move(r));
  });
  if (set.records.empty()) set.warnings.push_back("prompt set is empty");
  return set;
}

PromptSet LoadPromptSet(const std::filesystem::path& path) {
  std::ifstream in = OpenOrThrow(path);
  PromptSet set = ParsePromptSet(in);
  for (const std::string& w : set.warnings) {
    std::cerr << "warning: " << path.string() << ": " << w << "\n";
  }
  return set;
}

nlohmann::json SceneGraphToJson(const std::vector<SceneElement>& graph) {
  json out = json::array();
  for (const SceneElement& e : graph) {
    out.push_back({{"kind", ElementKindName(e.kind)}, {"text", e.text}});
  }
  return out;
}

nlohmann::json PromptRecordToJson(const PromptRecord& r) {
  json j = {{"id", r.id},
            {"text", r.text},
            {"category", CategoryName(r.category)},
            {"scene_graph", SceneGraphToJson(r.scene_graph)}};
  if (r.image_path) j["image_path"] = *r.image_path;
  return j;
}

bool IsMetricName(const std::string& name) {
  return name == "geo" || name == "sem" || name == "struct" ||
         name == "align" || name == "aes";
}

std::vector<AnnotationRecord> ParseAnnotations(std::istream& in) {
  std::vector<AnnotationRecord> out;
  ForEachJsonLine(in, [&](const json& j, size_t line) {
    AnnotationRecord r;
    r.prompt_id = IdField(j, "prompt_id", line);
    r.model_id = IdField(j, "model_id", line);
    r.metric = StringField(j, "metric", line);
    if (r.metric == "geo" || r.metric == "aes") {
      if (!j.contains("rank") || !j.at("rank").is_number_integer()) {
        LineError(line, "\"" + r.metric + "\" annotation needs integer \"rank\"");
      }
      const int rank = j.at("rank").get<int>();
      if (rank < 0 || rank > 9) LineError(line, "rank outside 0-9");
      r.payload = rank;
    } else if (r.metric == "sem" || r.metric == "struct") {
      const std::string label = StringField(j, "label", line);
      if (label == "yes") {
        r.payload = HumanLabel::kYes;
      } else if (label == "uncertain-yes") {
        r.payload = HumanLabel::kUncertainYes;
      } else if (label == "uncertain-no") {
        r.payload = HumanLabel::kUncertainNo;
      } else if (label == "no") {
        r.payload = HumanLabel::kNo;
      } else {
        LineError(line, "unknown label \"" + label + "\"");
      }
    } else if (r.metric == "align") {
      if (!j.contains("answers") || !j.at("answers").is_array()) {
        LineError(line, "\"align\" annotation needs an \"answers\" array");
      }
      std::vector<AlignAnswer> answers;
      for (const json& a : j.at("answers")) {
        const std::string s = a.is_string() ? a.get<std::string>() : "";
        if (s == "yes") {
          answers.push_back(AlignAnswer::kYes);
        } else if (s == "no") {
          answers.push_back(AlignAnswer::kNo);
        } else if (s == "unreasonable") {
          answers.push_back(AlignAnswer::kUnreasonable);
        } else {
          LineError(line, "answers must be \"yes\", \"no\" or \"unreasonable\"");
        }
      }
      r.payload = std::move(answers);
    } else {
      LineError(line, "unknown metric \"" + r.metric + "\"");
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<AnnotationRecord> LoadAnnotations(const std::filesystem::path& path) {
  std::ifstream in = OpenOrThrow(path);
  return ParseAnnotations(in);
}

std::vector<ScoreRecord> ParseScores(std::istream& in) {
  std::vector<ScoreRecord> out;
  ForEachJsonLine(in, [&](const json& j, size_t line) {
    ScoreRecord r;
    r.prompt_id = IdField(j, "prompt_id", line);
    r.model_id = IdField(j, "model_id", line);
    r.metric = StringField(j, "metric", line);
    if (!IsMetricName(r.metric)) LineError(line, "unknown metric \"" + r.metric + "\"");
    if (!j.contains("score") || !j.at("score").is_number()) {
      LineError(line, "\"score\" must be a number");
    }
    r.score = j.at("score").get<double>();
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<ScoreRecord> LoadScores(const std::filesystem::path& path) {
  std::ifstream in = OpenOrThrow(path);
  return ParseScores(in);
}

}  // namespace eval3d

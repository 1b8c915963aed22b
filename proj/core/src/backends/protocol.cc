#include "eval3d/backends/protocol.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "eval3d/common/error.h"

namespace eval3d {
namespace {

[[noreturn]] void Contract(const std::string& what) {
  throw Error(ErrorCode::kShapeContract, "shape contract violated: " + what);
}

const Tensor& RequireTensor(const BackendResponse& r, const std::string& name) {
  auto it = r.tensors.find(name);
  if (it == r.tensors.end()) Contract("missing tensor output '" + name + "'");
  return it->second;
}

int ParamInt(const nlohmann::json& params, const char* key) {
  if (!params.contains(key) || !params[key].is_number_integer()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("request params missing integer '") + key + "'");
  }
  return params[key].get<int>();
}

double RequireNumber(const BackendResponse& r, const char* key) {
  if (!r.outputs.contains(key) || !r.outputs[key].is_number()) {
    Contract(std::string("missing numeric output '") + key + "'");
  }
  const double v = r.outputs[key].get<double>();
  if (!std::isfinite(v)) Contract(std::string("non-finite '") + key + "'");
  return v;
}

}  // namespace

std::string_view KindName(BackendKind kind) {
  switch (kind) {
    case BackendKind::kDepth: return "depth";
    case BackendKind::kFeatures: return "features";
    case BackendKind::kNvs: return "nvs";
    case BackendKind::kPerceptual: return "perceptual";
    case BackendKind::kQaGen: return "qagen";
    case BackendKind::kVqa: return "vqa";
    case BackendKind::kAesthetic: return "aesthetic";
    case BackendKind::kPairwise: return "pairwise";
  }
  return "unknown";
}

const std::vector<BackendKind>& AllKinds() {
  static const std::vector<BackendKind> kAll = {
      BackendKind::kDepth,      BackendKind::kFeatures, BackendKind::kNvs,
      BackendKind::kPerceptual, BackendKind::kQaGen,    BackendKind::kVqa,
      BackendKind::kAesthetic,  BackendKind::kPairwise};
  return kAll;
}

BackendKind ParseKind(std::string_view name) {
  for (BackendKind k : AllKinds()) {
    if (KindName(k) == name) return k;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown backend kind '" + std::string(name) + "'");
}

void ValidateQaItem(const QAItem& item) {
  if (item.choices.size() < 2) {
    throw Error(ErrorCode::kShapeContract,
                "question '" + item.question + "' has fewer than 2 choices");
  }
  if (std::find(item.choices.begin(), item.choices.end(), item.gold) ==
      item.choices.end()) {
    throw Error(ErrorCode::kShapeContract,
                "gold answer '" + item.gold + "' is not among the choices");
  }
}

nlohmann::json QaItemToJson(const QAItem& item) {
  return {{"question", item.question},
          {"choices", item.choices},
          {"gold", item.gold}};
}

QAItem QaItemFromJson(const nlohmann::json& j) {
  QAItem item;
  item.question = j.at("question").get<std::string>();
  item.choices = j.at("choices").get<std::vector<std::string>>();
  item.gold = j.at("gold").get<std::string>();
  return item;
}

nlohmann::json RequestToJson(const BackendRequest& request,
                             const std::map<std::string, std::string>& paths) {
  nlohmann::json inputs = nlohmann::json::object();
  for (const auto& [name, path] : paths) inputs[name] = path;
  return {{"protocol", kProtocolVersion},
          {"kind", KindName(request.kind)},
          {"inputs", inputs},
          {"params", request.params}};
}

const std::vector<std::string>& TensorOutputs(BackendKind kind) {
  static const std::vector<std::string> kNone;
  static const std::vector<std::string> kDepthOut = {"depth"};
  static const std::vector<std::string> kFeatureOut = {"features"};
  static const std::vector<std::string> kImageOut = {"image"};
  switch (kind) {
    case BackendKind::kDepth: return kDepthOut;
    case BackendKind::kFeatures: return kFeatureOut;
    case BackendKind::kNvs: return kImageOut;
    default: return kNone;
  }
}

BackendResponse ParseResponse(const nlohmann::json& j,
                              const std::filesystem::path& job_dir,
                              BackendKind kind) {
  BackendResponse r;
  const std::string status = j.value("status", "");
  if (status == "ok") {
    r.status = BackendStatus::kOk;
  } else if (status == "error") {
    r.status = BackendStatus::kError;
  } else {
    throw Error(ErrorCode::kParse, "response.json: status must be ok|error");
  }
  r.message = j.value("message", "");
  if (j.contains("backend")) r.backend = j["backend"];
  if (j.contains("outputs")) r.outputs = j["outputs"];
  if (r.status == BackendStatus::kError) return r;
  if (!r.outputs.is_object()) {
    throw Error(ErrorCode::kParse, "response.json: outputs must be an object");
  }
  for (const std::string& name : TensorOutputs(kind)) {
    if (!r.outputs.contains(name) || !r.outputs[name].is_string()) {
      Contract("missing tensor output '" + name + "'");
    }
    const std::filesystem::path rel = r.outputs[name].get<std::string>();
    if (rel.is_absolute() || rel.string().find("..") != std::string::npos) {
      Contract("output path '" + rel.string() + "' escapes the job directory");
    }
    r.tensors.emplace(name, ReadTensor(job_dir / rel));
  }
  return r;
}

void ValidateResponse(const BackendRequest& request,
                      const BackendResponse& r) {
  const nlohmann::json& params = request.params;
  switch (request.kind) {
    case BackendKind::kDepth: {
      const Tensor& t = RequireTensor(r, "depth");
      const std::vector<uint64_t> want = {
          static_cast<uint64_t>(ParamInt(params, "height")),
          static_cast<uint64_t>(ParamInt(params, "width"))};
      if (t.dtype() != DType::kF32 || t.dims() != want) {
        Contract("expected H×W f32 depth " + DescribeDims(want) + ", got " +
                 DescribeDims(t.dims()));
      }
      const std::string conv = r.outputs.value("depth_convention", "depth");
      if (conv != "depth" && conv != "disparity") {
        Contract("depth_convention must be depth|disparity");
      }
      break;
    }
    case BackendKind::kFeatures: {
      const Tensor& t = RequireTensor(r, "features");
      if (t.dtype() != DType::kF32 || t.dims().size() != 3 ||
          t.dims()[1] != kFeatureMapSize || t.dims()[2] != kFeatureMapSize) {
        Contract("expected C×256×256, got " + DescribeDims(t.dims()));
      }
      if (!r.outputs.contains("channels") ||
          !r.outputs["channels"].is_number_integer() ||
          r.outputs["channels"].get<uint64_t>() != t.dims()[0]) {
        Contract("declared channels do not match C×256×256 tensor " +
                 DescribeDims(t.dims()));
      }
      break;
    }
    case BackendKind::kNvs: {
      const Tensor& t = RequireTensor(r, "image");
      const auto& target = params.at("target");
      const std::vector<uint64_t> want = {
          target.at("height").get<uint64_t>(), target.at("width").get<uint64_t>(), 3};
      if (t.dtype() != DType::kU8 || t.dims() != want) {
        Contract("expected H×W×3 u8 image " + DescribeDims(want) + ", got " +
                 DescribeDims(t.dims()));
      }
      break;
    }
    case BackendKind::kPerceptual: {
      const double d = RequireNumber(r, "distance");
      if (d < 0.0 || d > 1.0) Contract("perceptual distance outside [0,1]");
      break;
    }
    case BackendKind::kQaGen: {
      if (!r.outputs.contains("items") || !r.outputs["items"].is_array()) {
        Contract("qagen must return an 'items' array");
      }
      for (const auto& item : r.outputs["items"]) {
        ValidateQaItem(QaItemFromJson(item));
      }
      break;
    }
    case BackendKind::kVqa: {
      if (!r.outputs.contains("answer") || !r.outputs["answer"].is_string()) {
        Contract("vqa must return an 'answer' string");
      }
      const auto choices = params.at("choices").get<std::vector<std::string>>();
      const auto answer = r.outputs["answer"].get<std::string>();
      if (std::find(choices.begin(), choices.end(), answer) == choices.end()) {
        Contract("vqa answer '" + answer + "' is not one of the choices");
      }
      break;
    }
    case BackendKind::kAesthetic:
      RequireNumber(r, "score");
      break;
    case BackendKind::kPairwise: {
      const std::string w = r.outputs.value("winner", "");
      if (w != "a" && w != "b" && w != "tie") {
        Contract("pairwise winner must be a|b|tie");
      }
      break;
    }
  }
}

nlohmann::json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

}  // namespace eval3d

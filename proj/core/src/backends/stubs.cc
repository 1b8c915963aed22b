#include "eval3d/backends/stubs.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "eval3d/backends/protocol.h"
#include "eval3d/backends/tensor_file.h"
#include "eval3d/common/error.h"
#include "eval3d/common/png_io.h"

namespace eval3d {
namespace {

using nlohmann::json;

const json& KindScript(const json& script, const std::string& kind) {
  static const json kEmpty = json::object();
  if (script.contains(kind) && script[kind].is_object()) return script[kind];
  return kEmpty;
}

[[noreturn]] void Miss(const std::string& what) {
  throw Error(ErrorCode::kStubLookupMiss, "stub lookup miss: " + what);
}

std::filesystem::path InputPath(const json& request,
                                const std::filesystem::path& job,
                                const std::string& name) {
  const auto& inputs = request.at("inputs");
  if (!inputs.contains(name)) {
    throw Error(ErrorCode::kInvalidArgument,
                "stub needs input '" + name + "'");
  }
  return job / inputs[name].get<std::string>();
}

RgbImage LoadImageInput(const json& request, const std::filesystem::path& job,
                        const std::string& name) {
  const auto path = InputPath(request, job, name);
  if (path.extension() == ".png") return ReadPngRgb(path);
  return TensorToImage(ReadTensor(path));
}

json ServeDepth(const json& cfg, const json& request,
                const std::filesystem::path& job) {
  Tensor depth = ReadTensor(InputPath(request, job, "reference_depth"));
  const std::string mode = cfg.value("mode", "echo");
  std::string convention = "depth";
  if (mode == "affine") {
    const float s = cfg.value("scale", 1.0f), b = cfg.value("shift", 0.0f);
    for (float& v : depth.f32()) {
      if (v > 0.0f) v = s * v + b;
    }
  } else if (mode == "disparity") {
    for (float& v : depth.f32()) {
      if (v > 0.0f) v = 1.0f / v;
    }
    convention = "disparity";
  } else if (mode != "echo") {
    Miss("depth mode " + mode);
  }
  WriteTensor(job / "outputs/depth.etns", depth);
  return {{"depth", "outputs/depth.etns"}, {"depth_convention", convention}};
}

json ServeFeatures(const json& cfg, const json& request,
                   const std::filesystem::path& job) {
  const std::string mode = cfg.value("mode", "constant");
  const auto channels = cfg.value("channels", uint64_t{8});
  std::vector<float> per_channel(channels, cfg.value("value", 0.5f));
  if (mode == "per_view") {
    const std::string view = std::to_string(request.at("params").at("view_id").get<int>());
    const auto& values = cfg.at("values");
    if (!values.contains(view)) Miss("features for view " + view);
    per_channel = values[view].get<std::vector<float>>();
    if (per_channel.size() != channels) Miss("channel count for view " + view);
  } else if (mode != "constant") {
    Miss("features mode " + mode);
  }
  constexpr uint64_t kPlane = kFeatureMapSize * kFeatureMapSize;
  std::vector<float> data(channels * kPlane);
  for (uint64_t c = 0; c < channels; ++c) {
    std::fill_n(data.begin() + c * kPlane, kPlane, per_channel[c]);
  }
  WriteTensor(job / "outputs/features.etns",
              Tensor({channels, kFeatureMapSize, kFeatureMapSize}, std::move(data)));
  return {{"features", "outputs/features.etns"}, {"channels", channels}};
}

json ServeNvs(const json& cfg, const json& request,
              const std::filesystem::path& job) {
  const std::string mode = cfg.value("mode", "reference");
  if (mode != "reference") Miss("nvs mode " + mode);
  const RgbImage image = LoadImageInput(request, job, "reference_target");
  WriteTensor(job / "outputs/image.etns", ImageToTensor(image));
  return {{"image", "outputs/image.etns"}};
}

json ServePerceptual(const json& cfg, const json& request,
                     const std::filesystem::path& job) {
  const std::string mode = cfg.value("mode", "ncc");
  double distance = 0.0;
  if (mode == "ncc") {
    distance = NccDistance(LoadImageInput(request, job, "image_a"),
                           LoadImageInput(request, job, "image_b"));
  } else if (mode == "table") {
    const std::string tag = request.at("params").value("tag", "");
    const auto& table = cfg.at("table");
    if (!table.contains(tag)) Miss("perceptual tag '" + tag + "'");
    distance = table[tag].get<double>();
  } else if (mode == "constant") {
    distance = cfg.value("value", 0.0);
  } else {
    Miss("perceptual mode " + mode);
  }
  return {{"distance", distance}};
}

json ServeQaGen(const json& cfg, const json& request) {
  const std::string mode = cfg.value("mode", "template");
  const std::string prompt = request.at("params").value("prompt", "");
  json items = json::array();
  if (mode == "template") {
    items.push_back(QaItemToJson(
        {"Does the object match the description \"" + prompt + "\"?",
         {"Yes", "No"},
         "Yes"}));
  } else if (mode == "table") {
    const auto& table = cfg.at("table");
    if (!table.contains(prompt)) Miss("questions for prompt '" + prompt + "'");
    items = table[prompt];
  } else {
    Miss("qagen mode " + mode);
  }
  return {{"items", items}};
}

json ServeVqa(const json& cfg, const json& request) {
  const std::string mode = cfg.value("mode", "constant");
  const auto& params = request.at("params");
  if (mode == "constant") return {{"answer", cfg.value("answer", "Yes")}};
  if (mode != "table") Miss("vqa mode " + mode);
  const std::string key = std::to_string(params.at("view_id").get<int>()) + "|" +
                          params.at("question").get<std::string>();
  const auto& table = cfg.at("table");
  if (table.contains(key)) return {{"answer", table[key]}};
  if (cfg.contains("default") && cfg["default"].is_string()) {
    return {{"answer", cfg["default"]}};
  }
  Miss("vqa answer for '" + key + "'");
}

json ServeAesthetic(const json& cfg, const json& request) {
  const std::string mode = cfg.value("mode", "constant");
  if (mode == "constant") return {{"score", cfg.value("value", 1.0)}};
  if (mode != "per_view") Miss("aesthetic mode " + mode);
  const std::string view = std::to_string(request.at("params").at("view_id").get<int>());
  const auto& values = cfg.at("values");
  if (!values.contains(view)) Miss("aesthetic score for view " + view);
  return {{"score", values[view].get<double>()}};
}

json ServePairwise(const json& cfg, const json& request) {
  const std::string mode = cfg.value("mode", "rank");
  const auto& params = request.at("params");
  const std::string a = params.at("model_a").get<std::string>();
  const std::string b = params.at("model_b").get<std::string>();
  if (mode == "rank") {
    // Without a rank table every comparison is a tie.
    if (!cfg.contains("ranks")) return {{"winner", "tie"}};
    const auto& ranks = cfg.at("ranks");
    if (!ranks.contains(a)) Miss("rank of model " + a);
    if (!ranks.contains(b)) Miss("rank of model " + b);
    const double ra = ranks[a].get<double>(), rb = ranks[b].get<double>();
    return {{"winner", ra < rb ? "a" : (rb < ra ? "b" : "tie")}};
  }
  if (mode != "table") Miss("pairwise mode " + mode);
  const auto& table = cfg.at("table");
  if (!table.contains(a + "|" + b)) Miss("pairwise outcome " + a + "|" + b);
  return {{"winner", table[a + "|" + b]}};
}

}  // namespace

double NccDistance(const RgbImage& a, const RgbImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::kShapeContract, "perceptual: image sizes differ");
  }
  auto luma = [](const Rgb8& p) {
    return 0.299 * p.r + 0.587 * p.g + 0.114 * p.b;
  };
  const size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    ma += luma(a.data()[i]);
    mb += luma(b.data()[i]);
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double da = luma(a.data()[i]) - ma;
    const double db = luma(b.data()[i]) - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return a == b ? 0.0 : 1.0;
  return std::clamp(1.0 - sab / std::sqrt(saa * sbb), 0.0, 1.0);
}

json DefaultStubScript() {
  return {{"depth", {{"mode", "echo"}}},
          {"features", {{"mode", "constant"}, {"channels", 8}, {"value", 0.5}}},
          {"nvs", {{"mode", "reference"}}},
          {"perceptual", {{"mode", "ncc"}}},
          {"qagen", {{"mode", "template"}}},
          {"vqa", {{"mode", "constant"}, {"answer", "Yes"}}},
          {"aesthetic", {{"mode", "constant"}, {"value", 1.0}}},
          {"pairwise", {{"mode", "rank"}, {"ranks", json::object()}}}};
}

int ServeStubJob(const json& script, const std::filesystem::path& job_dir) {
  json response;
  std::string kind_name = "unknown";
  try {
    const json request = ReadJsonFile(job_dir / "request.json");
    kind_name = request.at("kind").get<std::string>();
    const BackendKind kind = ParseKind(kind_name);
    const json& cfg = KindScript(script, kind_name);
    json outputs;
    switch (kind) {
      case BackendKind::kDepth: outputs = ServeDepth(cfg, request, job_dir); break;
      case BackendKind::kFeatures: outputs = ServeFeatures(cfg, request, job_dir); break;
      case BackendKind::kNvs: outputs = ServeNvs(cfg, request, job_dir); break;
      case BackendKind::kPerceptual: outputs = ServePerceptual(cfg, request, job_dir); break;
      case BackendKind::kQaGen: outputs = ServeQaGen(cfg, request); break;
      case BackendKind::kVqa: outputs = ServeVqa(cfg, request); break;
      case BackendKind::kAesthetic: outputs = ServeAesthetic(cfg, request); break;
      case BackendKind::kPairwise: outputs = ServePairwise(cfg, request); break;
    }
    response = {{"status", "ok"},
                {"outputs", outputs},
                {"backend",
                 {{"name", "stub:" + kind_name + ":" + cfg.value("mode", "default")},
                  {"version", "1"}}}};
  } catch (const std::exception& e) {
    response = {{"status", "error"},
                {"message", e.what()},
                {"backend", {{"name", "stub:" + kind_name}, {"version", "1"}}}};
  }
  WriteJsonFile(job_dir / "response.json", response);
  return response["status"] == "ok" ? 0 : 1;
}

}  // namespace eval3d

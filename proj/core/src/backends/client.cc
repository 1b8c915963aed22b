#include "eval3d/backends/client.h"

#include "eval3d/common/error.h"

namespace eval3d {
namespace {

nlohmann::json PoseJson(const CameraView& view) { return ViewToJson(view); }

}  // namespace

const BackendSpec& BackendSet::Get(BackendKind kind) const {
  auto it = specs_.find(kind);
  if (it == specs_.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "no " + std::string(KindName(kind)) + " backend");
  }
  return it->second;
}

DepthPrediction PredictDepth(const BackendSpec& spec, const RgbImage& image,
                             const CameraView& view,
                             const Grid<float>* reference_depth) {
  BackendRequest req;
  req.kind = BackendKind::kDepth;
  req.inputs.emplace("image", image);
  if (reference_depth) {
    req.inputs.emplace("reference_depth", GridToTensor(*reference_depth));
  }
  req.params = {{"view_id", view.id},
                {"width", view.width},
                {"height", view.height},
                {"pose", PoseJson(view)}};
  const BackendResponse r = InvokeBackend(spec, req);
  return {TensorToGrid(r.tensors.at("depth")),
          r.outputs.value("depth_convention", "depth") == "disparity"};
}

Tensor ExtractFeatures(const BackendSpec& spec, const RgbImage& image,
                       const CameraView& view) {
  BackendRequest req;
  req.kind = BackendKind::kFeatures;
  req.inputs.emplace("image", image);
  req.params = {{"view_id", view.id},
                {"width", view.width},
                {"height", view.height},
                {"output_size", kFeatureMapSize}};
  BackendResponse r = InvokeBackend(spec, req);
  return std::move(r.tensors.at("features"));
}

RgbImage SynthesizeView(const BackendSpec& spec, const RgbImage& source,
                        const CameraView& source_view,
                        const CameraView& target_view,
                        const RgbImage* reference_target) {
  BackendRequest req;
  req.kind = BackendKind::kNvs;
  req.inputs.emplace("image", source);
  if (reference_target) req.inputs.emplace("reference_target", *reference_target);
  req.params = {
      {"source", PoseJson(source_view)},
      {"target", PoseJson(target_view)},
      {"relative",
       {{"azimuth", target_view.azimuth_deg - source_view.azimuth_deg},
        {"elevation", target_view.elevation_deg - source_view.elevation_deg},
        {"radius", target_view.distance - source_view.distance}}}};
  const BackendResponse r = InvokeBackend(spec, req);
  return TensorToImage(r.tensors.at("image"));
}

double PerceptualDistance(const BackendSpec& spec, const RgbImage& a,
                          const RgbImage& b, const std::string& tag) {
  BackendRequest req;
  req.kind = BackendKind::kPerceptual;
  req.inputs.emplace("image_a", a);
  req.inputs.emplace("image_b", b);
  req.params = {{"tag", tag}};
  return InvokeBackend(spec, req).outputs.at("distance").get<double>();
}

std::vector<QAItem> GenerateQuestions(const BackendSpec& spec,
                                      const std::string& prompt,
                                      const nlohmann::json& scene_graph) {
  BackendRequest req;
  req.kind = BackendKind::kQaGen;
  req.params = {{"prompt", prompt}, {"scene_graph", scene_graph}};
  const BackendResponse r = InvokeBackend(spec, req);
  std::vector<QAItem> items;
  for (const auto& j : r.outputs.at("items")) items.push_back(QaItemFromJson(j));
  return items;
}

std::string AnswerQuestion(const BackendSpec& spec, const RgbImage& image,
                           const CameraView& view, const QAItem& item) {
  BackendRequest req;
  req.kind = BackendKind::kVqa;
  req.inputs.emplace("image", image);
  req.params = {{"view_id", view.id},
                {"question", item.question},
                {"choices", item.choices}};
  return InvokeBackend(spec, req).outputs.at("answer").get<std::string>();
}

double AestheticScore(const BackendSpec& spec, const RgbImage& image,
                      const CameraView& view) {
  BackendRequest req;
  req.kind = BackendKind::kAesthetic;
  req.inputs.emplace("image", image);
  req.params = {{"view_id", view.id}};
  return InvokeBackend(spec, req).outputs.at("score").get<double>();
}

PairWinner JudgePair(const BackendSpec& spec, const RgbImage& image_a,
                     const RgbImage& image_b, const std::string& model_a,
                     const std::string& model_b, const std::string& prompt) {
  BackendRequest req;
  req.kind = BackendKind::kPairwise;
  req.inputs.emplace("image_a", image_a);
  req.inputs.emplace("image_b", image_b);
  req.params = {{"model_a", model_a}, {"model_b", model_b}, {"prompt", prompt}};
  const std::string w =
      InvokeBackend(spec, req).outputs.at("winner").get<std::string>();
  if (w == "a") return PairWinner::kA;
  if (w == "b") return PairWinner::kB;
  return PairWinner::kTie;
}

}  // namespace eval3d

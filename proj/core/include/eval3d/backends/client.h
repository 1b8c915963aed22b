#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eval3d/backends/invoke.h"
#include "eval3d/backends/protocol.h"
#include "eval3d/camrig/camera.h"
#include "eval3d/common/grid.h"

namespace eval3d {

// Typed wrappers around InvokeBackend, one per kind. Each builds the request
// (inputs + params), invokes, and decodes the validated response.

struct DepthPrediction {
  Grid<float> depth;
  bool is_disparity = false;
};

// reference_depth is attached for backends that echo it (the depth stub).
DepthPrediction PredictDepth(const BackendSpec& spec, const RgbImage& image,
                             const CameraView& view,
                             const Grid<float>* reference_depth);

// C x 256 x 256 f32.
Tensor ExtractFeatures(const BackendSpec& spec, const RgbImage& image,
                       const CameraView& view);

// reference_target is the engine's own render at the target pose.
RgbImage SynthesizeView(const BackendSpec& spec, const RgbImage& source,
                        const CameraView& source_view,
                        const CameraView& target_view,
                        const RgbImage* reference_target);

double PerceptualDistance(const BackendSpec& spec, const RgbImage& a,
                          const RgbImage& b, const std::string& tag);

std::vector<QAItem> GenerateQuestions(const BackendSpec& spec,
                                      const std::string& prompt,
                                      const nlohmann::json& scene_graph);

std::string AnswerQuestion(const BackendSpec& spec, const RgbImage& image,
                           const CameraView& view, const QAItem& item);

double AestheticScore(const BackendSpec& spec, const RgbImage& image,
                      const CameraView& view);

enum class PairWinner { kA, kB, kTie };

PairWinner JudgePair(const BackendSpec& spec, const RgbImage& image_a,
                     const RgbImage& image_b, const std::string& model_a,
                     const std::string& model_b, const std::string& prompt);

// Backend specs per kind, as configured for a run.
class BackendSet {
 public:
  void Set(BackendKind kind, BackendSpec spec) { specs_[kind] = std::move(spec); }
  bool Has(BackendKind kind) const { return specs_.count(kind) != 0; }
  const BackendSpec& Get(BackendKind kind) const;
  const std::map<BackendKind, BackendSpec>& all() const { return specs_; }

 private:
  std::map<BackendKind, BackendSpec> specs_;
};

}  // namespace eval3d

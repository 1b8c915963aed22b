#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "eval3d/backends/tensor_file.h"
#include "eval3d/common/grid.h"

namespace eval3d {

inline constexpr std::string_view kProtocolVersion = "eval3d-backend/1";
// Spatial size every feature map must have.
inline constexpr uint64_t kFeatureMapSize = 256;

// One sidecar role per foundation model. kPairwise is the optional
// pairwise aesthetic judge consumed by model comparison.
enum class BackendKind {
  kDepth,
  kFeatures,
  kNvs,
  kPerceptual,
  kQaGen,
  kVqa,
  kAesthetic,
  kPairwise,
};

std::string_view KindName(BackendKind kind);
BackendKind ParseKind(std::string_view name);
const std::vector<BackendKind>& AllKinds();

struct QAItem {
  std::string question;
  std::vector<std::string> choices;
  std::string gold;

  bool operator==(const QAItem&) const = default;
};

// Throws kShapeContract unless there are >= 2 choices and gold is one of them.
void ValidateQaItem(const QAItem& item);
nlohmann::json QaItemToJson(const QAItem& item);
QAItem QaItemFromJson(const nlohmann::json& j);

using BackendInput = std::variant<Tensor, RgbImage>;

struct BackendRequest {
  BackendKind kind = BackendKind::kDepth;
  // Tensors are written as inputs/<name>.etns, images as inputs/<name>.png.
  std::map<std::string, BackendInput> inputs;
  nlohmann::json params = nlohmann::json::object();
};

enum class BackendStatus { kOk, kError };

struct BackendResponse {
  BackendStatus status = BackendStatus::kOk;
  std::string message;
  // Kind-specific outputs as written by the backend; tensor outputs are
  // job-relative paths and are also loaded into `tensors`.
  nlohmann::json outputs = nlohmann::json::object();
  std::map<std::string, Tensor> tensors;
  nlohmann::json backend = nlohmann::json::object();
};

// request.json content with input names mapped to job-relative paths.
nlohmann::json RequestToJson(const BackendRequest& request,
                             const std::map<std::string, std::string>& paths);

// Names of outputs that are tensor files for this kind.
const std::vector<std::string>& TensorOutputs(BackendKind kind);

// Parses response.json and loads tensor outputs relative to job_dir.
BackendResponse ParseResponse(const nlohmann::json& j,
                              const std::filesystem::path& job_dir,
                              BackendKind kind);

// Checks a successful response against the kind's contract, using the
// request params for expected sizes. Throws kShapeContract.
void ValidateResponse(const BackendRequest& request,
                      const BackendResponse& response);

// Helpers used by backend implementations (stubs, adapters written in C++).
nlohmann::json ReadJsonFile(const std::filesystem::path& path);
void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace eval3d

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eval3d/backends/client.h"
#include "eval3d/camrig/camera.h"
#include "eval3d/localize/heatmap.h"
#include "eval3d/metrics/aesthetic.h"
#include "eval3d/metrics/alignment.h"
#include "eval3d/metrics/geometric.h"
#include "eval3d/metrics/semantic.h"
#include "eval3d/metrics/structural.h"

namespace eval3d {

inline const std::array<std::string, 5> kMetricNames = {"geo", "sem", "struct",
                                                        "align", "aes"};

// Threshold used for the semantic metric under --stub-all when none is
// configured. Stub features are view-independent, so any positive value
// gives the same score.
inline constexpr double kStubDeltaDino = 0.01;

struct MetricsConfig {
  std::set<std::string> enabled{kMetricNames.begin(), kMetricNames.end()};
  GeoConfig geo;
  int geo_views = 0;  // 0 = every rig view
  SemConfig sem;
  int sem_views = 0;
  StructConfig structural;
  AlignConfig align;
  int aes_views = 12;
  AestheticCalibration aes_calibration;
};

struct RunConfig {
  std::filesystem::path mesh;
  std::optional<std::filesystem::path> rgb_dir;  // view_<id>.png
  std::string prompt;
  std::string prompt_id;
  std::string model_id;
  nlohmann::json scene_graph = nlohmann::json::array();
  RigSpec rig;
  MetricsConfig metrics;
  BackendSet backends;
  std::filesystem::path output_dir = "eval3d_out";
  int64_t seed = 0;
  // Colorized normal renders stand in for RGB views when none are given.
  bool allow_proxy_rgb = false;
  bool write_view_evidence = true;
  bool keep_jobs = false;
  std::optional<HeatRange> geo_heat_range;
  std::optional<HeatRange> sem_heat_range;
};

// Relative paths resolve against base_dir. Throws kParse / kInvalidArgument
// with the offending field.
RunConfig ParseRunConfig(const nlohmann::json& j,
                         const std::filesystem::path& base_dir);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Parses one backend entry: "stub", {"stub": {...}} or
// {"command": [...], "timeout_s": n}.
BackendSpec ParseBackendSpec(BackendKind kind, const nlohmann::json& j,
                             const std::filesystem::path& base_dir);

struct RunOverrides {
  std::optional<std::filesystem::path> output_dir;
  bool stub_all = false;
  std::optional<int> views;
  std::optional<std::vector<std::string>> metrics;
};

// --stub-all swaps every non-stub backend for the default stub, enables
// proxy RGB and fills in a semantic threshold when missing.
void ApplyOverrides(RunConfig& config, const RunOverrides& overrides);

// Backend kinds a metric needs.
std::vector<BackendKind> RequiredBackends(const std::string& metric);

// Resolved configuration for the report.
nlohmann::json RunConfigToJson(const RunConfig& config);

}  // namespace eval3d

#pragma once

#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "eval3d/common/grid.h"
#include "eval3d/pipeline/run_config.h"

namespace eval3d {

inline constexpr const char* kReportFormat = "eval3d-report/1";

struct RunOutcome {
  nlohmann::json report;
  // 0 when every requested metric was computed, 2 when some were skipped,
  // 1 when the run could not start (mesh, RGB views or output directory).
  int exit_code = 0;
  std::map<std::string, std::optional<double>> scores;
};

// Renders, calls backends, scores, localizes and writes report.json plus
// evidence, heatmaps and summary images under config.output_dir. Metric
// failures become "skipped: <stage>: <reason>" slots; the report is
// written in every case.
RunOutcome RunEval(const RunConfig& config);

// The asset's image at rig view 0 (RGB input or proxy render); nullopt when
// no RGB source is available.
std::optional<RgbImage> FrontViewImage(const RunConfig& config);

// Report without its "timings" block, for determinism comparisons.
nlohmann::json StripTimings(const nlohmann::json& report);

}  // namespace eval3d

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "eval3d/bench/promptset.h"

namespace eval3d {

// (prompt id, model id)
using ItemKey = std::pair<std::string, std::string>;

struct PairwiseAgreementResult {
  double percent = 0.0;
  size_t agreeing = 0;
  size_t comparable = 0;
};

// Over unordered model pairs within each prompt where both sides are present
// and the human scores differ: share of pairs where the metric orders the
// pair the same way (higher is better on both sides). A metric tie counts
// as disagreement. Throws kInsufficientData without comparable pairs.
PairwiseAgreementResult PairwiseAgreement(
    const std::map<ItemKey, double>& metric,
    const std::map<ItemKey, double>& human);

struct ThresholdResult {
  double threshold = 0.0;
  double percent = 0.0;
};

// Predicts yes when score > threshold. Evaluates every midpoint between
// consecutive distinct sorted scores and returns the best; ties resolve to
// the lowest threshold. Throws kInsufficientData unless both classes are
// present and at least two distinct scores exist.
ThresholdResult ThresholdSweep(std::span<const double> scores,
                               std::span<const uint8_t> labels);

// Accuracy at a fixed threshold with the same rule.
double AgreementAtThreshold(std::span<const double> scores,
                            std::span<const uint8_t> labels, double threshold);

// Published operating points, in score percent.
inline constexpr double kStructOperatingPoint = 75.8;
inline constexpr double kSemOperatingPoint = 63.3;

enum class LabelScheme { kCollapseUncertain, kDropUncertain };

// nullopt when the label is dropped under the scheme.
std::optional<bool> ResolveLabel(HumanLabel label, LabelScheme scheme);

// Number of questions answered "yes".
double AlignHumanScore(const std::vector<AlignAnswer>& answers);

// Per-metric agreement table over the metrics present in both inputs.
nlohmann::json AgreementReport(const std::vector<ScoreRecord>& scores,
                               const std::vector<AnnotationRecord>& annotations,
                               LabelScheme scheme);

}  // namespace eval3d

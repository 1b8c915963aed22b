#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eval3d/backends/protocol.h"
#include "eval3d/metrics/score.h"

namespace eval3d {

struct AlignConfig {
  int n_views = 12;
  int adjacency_radius = 1;  // cyclic, self-inclusive
};

void ValidateAlignConfig(const AlignConfig& cfg);

// answers[j][v]: chosen string for question j at view v; nullopt = missing.
using AnswerMatrix = std::vector<std::vector<std::optional<std::string>>>;

struct AlignResult {
  MetricScore score;
  std::vector<std::vector<uint8_t>> correct;  // M x n_views
  std::vector<uint8_t> passed;                // per question
};

// A question passes when some view and every view within the adjacency
// radius of it answer with the gold choice. Missing answers never match.
AlignResult TextAlignment(const std::vector<QAItem>& qa,
                          const AnswerMatrix& answers, const AlignConfig& cfg);

}  // namespace eval3d

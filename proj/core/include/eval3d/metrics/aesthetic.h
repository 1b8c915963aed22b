#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "eval3d/metrics/score.h"

namespace eval3d {

struct AestheticCalibration {
  double lo = -2.0;
  double hi = 2.0;
};

struct AestheticResult {
  MetricScore score;
  std::vector<double> per_view;
  double raw_mean = 0.0;
};

// 100 * clamp((mean - lo) / (hi - lo), 0, 1).
AestheticResult AestheticMean(std::span<const double> raw,
                              const AestheticCalibration& cal = {});

enum class Outcome { kAWins, kBWins, kTie };

struct PairOutcome {
  std::string model_a;
  std::string model_b;
  Outcome outcome = Outcome::kTie;
};

struct EloResult {
  std::vector<std::string> models;  // sorted
  std::map<std::string, double> log_strength;  // centered natural log
  std::map<std::string, double> elo;           // 400 * log10 strength
  std::map<std::string, double> normalized;    // min-max to [0, 100]
  bool regularized = false;
};

// Pseudo-count added in both directions of each compared pair when the
// maximum-likelihood strengths are unbounded.
inline constexpr double kBradleyTerryPrior = 1e-3;

// Bradley-Terry maximum likelihood with ties as half wins. Throws
// kDisconnectedGraph naming the components when the comparison graph is
// disconnected.
EloResult AestheticElo(std::span<const PairOutcome> outcomes);

}  // namespace eval3d

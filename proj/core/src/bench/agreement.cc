#include "eval3d/bench/agreement.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "eval3d/common/error.h"

namespace eval3d {

PairwiseAgreementResult PairwiseAgreement(
    const std::map<ItemKey, double>& metric,
    const std::map<ItemKey, double>& human) {
  // prompt -> [(model, metric, human)]
  std::map<std::string, std::vector<std::pair<double, double>>> by_prompt;
  for (const auto& [key, h] : human) {
    auto it = metric.find(key);
    if (it == metric.end()) continue;
    by_prompt[key.first].emplace_back(it->second, h);
  }
  PairwiseAgreementResult r;
  for (const auto& [prompt, items] : by_prompt) {
    for (size_t i = 0; i < items.size(); ++i) {
      for (size_t j = i + 1; j < items.size(); ++j) {
        const double dh = items[i].second - items[j].second;
        if (dh == 0.0) continue;
        ++r.comparable;
        const double dm = items[i].first - items[j].first;
        if ((dm > 0 && dh > 0) || (dm < 0 && dh < 0)) ++r.agreeing;
      }
    }
  }
  if (r.comparable == 0) {
    throw Error(ErrorCode::kInsufficientData, "no comparable pairs");
  }
  r.percent = 100.0 * static_cast<double>(r.agreeing) / r.comparable;
  return r;
}

double AgreementAtThreshold(std::span<const double> scores,
                            std::span<const uint8_t> labels, double threshold) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "scores and labels differ in size");
  }
  size_t hits = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    hits += (scores[i] > threshold) == (labels[i] != 0);
  }
  return 100.0 * static_cast<double>(hits) / scores.size();
}

ThresholdResult ThresholdSweep(std::span<const double> scores,
                               std::span<const uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kInvalidArgument, "scores and labels differ in size");
  }
  size_t yes = 0;
  for (uint8_t l : labels) yes += l != 0;
  if (yes == 0 || yes == labels.size()) {
    throw Error(ErrorCode::kInsufficientData,
                "threshold sweep needs both label classes");
  }
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.size() < 2) {
    throw Error(ErrorCode::kInsufficientData,
                "threshold sweep needs two distinct scores");
  }
  ThresholdResult best{0.0, -1.0};
  for (size_t k = 0; k + 1 < sorted.size(); ++k) {
    const double t = 0.5 * (sorted[k] + sorted[k + 1]);
    const double acc = AgreementAtThreshold(scores, labels, t);
    if (acc > best.percent) best = {t, acc};
  }
  return best;
}

std::optional<bool> ResolveLabel(HumanLabel label, LabelScheme scheme) {
  switch (label) {
    case HumanLabel::kYes: return true;
    case HumanLabel::kNo: return false;
    case HumanLabel::kUncertainYes:
      if (scheme == LabelScheme::kDropUncertain) return std::nullopt;
      return true;
    case HumanLabel::kUncertainNo:
      if (scheme == LabelScheme::kDropUncertain) return std::nullopt;
      return false;
  }
  return std::nullopt;
}

double AlignHumanScore(const std::vector<AlignAnswer>& answers) {
  return static_cast<double>(
      std::count(answers.begin(), answers.end(), AlignAnswer::kYes));
}

nlohmann::json AgreementReport(const std::vector<ScoreRecord>& scores,
                               const std::vector<AnnotationRecord>& annotations,
                               LabelScheme scheme) {
  std::map<std::string, std::map<ItemKey, double>> metric;
  for (const ScoreRecord& s : scores) {
    metric[s.metric][{s.prompt_id, s.model_id}] = s.score;
  }
  std::map<std::string, std::map<ItemKey, double>> ranks;
  std::map<std::string, std::map<ItemKey, bool>> labels;
  for (const AnnotationRecord& a : annotations) {
    const ItemKey key{a.prompt_id, a.model_id};
    if (const int* rank = std::get_if<int>(&a.payload)) {
      ranks[a.metric][key] = *rank;
    } else if (const auto* ans = std::get_if<std::vector<AlignAnswer>>(&a.payload)) {
      ranks[a.metric][key] = AlignHumanScore(*ans);
    } else if (const auto* l = std::get_if<HumanLabel>(&a.payload)) {
      if (auto b = ResolveLabel(*l, scheme)) labels[a.metric][key] = *b;
    }
  }
  nlohmann::json report = nlohmann::json::object();
  for (const auto& [name, human] : ranks) {
    nlohmann::json entry = {{"kind", "pairwise"}};
    try {
      const PairwiseAgreementResult r = PairwiseAgreement(metric[name], human);
      entry["agreement"] = r.percent;
      entry["agreeing_pairs"] = r.agreeing;
      entry["comparable_pairs"] = r.comparable;
    } catch (const Error& e) {
      entry["error"] = e.what();
    }
    report[name] = entry;
  }
  for (const auto& [name, human] : labels) {
    std::vector<double> s;
    std::vector<uint8_t> l;
    for (const auto& [key, yes] : human) {
      auto it = metric[name].find(key);
      if (it == metric[name].end()) continue;
      s.push_back(it->second);
      l.push_back(yes);
    }
    nlohmann::json entry = {{"kind", "threshold"}, {"items", s.size()}};
    try {
      const ThresholdResult best = ThresholdSweep(s, l);
      entry["best_threshold"] = best.threshold;
      entry["best_agreement"] = best.percent;
    } catch (const Error& e) {
      entry["error"] = e.what();
    }
    const double fixed = name == "struct" ? kStructOperatingPoint
                         : name == "sem"  ? kSemOperatingPoint
                                          : std::nan("");
    if (!std::isnan(fixed) && !s.empty()) {
      entry["fixed_threshold"] = fixed;
      entry["fixed_agreement"] = AgreementAtThreshold(s, l, fixed);
    }
    report[name] = entry;
  }
  return report;
}

}  // namespace eval3d

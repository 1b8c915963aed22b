#include "eval3d/metrics/alignment.h"

#include "eval3d/common/error.h"

namespace eval3d {

void ValidateAlignConfig(const AlignConfig& cfg) {
  if (cfg.n_views < 3) {
    throw Error(ErrorCode::kInvalidArgument, "alignment needs n_views >= 3");
  }
  if (cfg.adjacency_radius < 0) {
    throw Error(ErrorCode::kInvalidArgument, "adjacency radius must be >= 0");
  }
}

AlignResult TextAlignment(const std::vector<QAItem>& qa,
                          const AnswerMatrix& answers, const AlignConfig& cfg) {
  ValidateAlignConfig(cfg);
  if (qa.empty()) throw Error(ErrorCode::kInsufficientData, "no questions");
  if (answers.size() != qa.size()) {
    throw Error(ErrorCode::kInvalidArgument, "answer matrix row count");
  }
  const int n = cfg.n_views;
  AlignResult r;
  int passed = 0;
  for (size_t j = 0; j < qa.size(); ++j) {
    if (answers[j].size() != static_cast<size_t>(n)) {
      throw Error(ErrorCode::kInvalidArgument, "answer matrix column count");
    }
    std::vector<uint8_t> ok(n);
    for (int v = 0; v < n; ++v) {
      ok[v] = answers[j][v].has_value() && *answers[j][v] == qa[j].gold;
    }
    bool pass = false;
    for (int i = 0; i < n && !pass; ++i) {
      bool all = true;
      for (int d = -cfg.adjacency_radius; d <= cfg.adjacency_radius; ++d) {
        all = all && ok[((i + d) % n + n) % n];
      }
      pass = all;
    }
    r.correct.push_back(std::move(ok));
    r.passed.push_back(pass);
    passed += pass;
  }
  r.score = {"align", 100.0 * passed / static_cast<double>(qa.size())};
  return r;
}

}  // namespace eval3d

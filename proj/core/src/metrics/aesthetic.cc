#include "eval3d/metrics/aesthetic.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "eval3d/common/error.h"

namespace eval3d {
namespace {

// Components of the graph whose edges are given by adj (i -> j when set),
// labelled in discovery order.
std::vector<int> Reachable(const Eigen::MatrixXd& adj, int start) {
  const int n = static_cast<int>(adj.rows());
  std::vector<int> seen(n, 0), stack{start};
  seen[start] = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      if (adj(i, j) > 0 && !seen[j]) {
        seen[j] = 1;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

bool StronglyConnected(const Eigen::MatrixXd& wins) {
  const int n = static_cast<int>(wins.rows());
  const std::vector<int> fwd = Reachable(wins, 0);
  const std::vector<int> bwd = Reachable(wins.transpose(), 0);
  for (int i = 0; i < n; ++i) {
    if (!fwd[i] || !bwd[i]) return false;
  }
  return true;
}

double LogLikelihood(const Eigen::MatrixXd& wins, const Eigen::VectorXd& th) {
  const int n = static_cast<int>(th.size());
  double ll = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || wins(i, j) == 0.0) continue;
      // log sigma(th_i - th_j), computed stably.
      const double x = th(i) - th(j);
      ll += wins(i, j) * (x > 0 ? -std::log1p(std::exp(-x))
                                : x - std::log1p(std::exp(x)));
    }
  }
  return ll;
}

// Newton's method on log-strengths with theta_0 pinned at 0.
Eigen::VectorXd FitBradleyTerry(const Eigen::MatrixXd& wins) {
  const int n = static_cast<int>(wins.rows());
  Eigen::VectorXd th = Eigen::VectorXd::Zero(n);
  if (n == 1) return th;
  const Eigen::MatrixXd games = wins + wins.transpose();
  const double total = games.sum() / 2.0;
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j || games(i, j) == 0.0) continue;
        const double p = 1.0 / (1.0 + std::exp(th(j) - th(i)));
        grad(i) += wins(i, j) - games(i, j) * p;
        const double w = games(i, j) * p * (1.0 - p);
        info(i, i) += w;
        info(i, j) -= w;
      }
    }
    const Eigen::VectorXd g = grad.tail(n - 1);
    if (g.cwiseAbs().maxCoeff() < 1e-13 * std::max(1.0, total)) break;
    const Eigen::VectorXd step =
        info.bottomRightCorner(n - 1, n - 1).ldlt().solve(g);
    const double ll0 = LogLikelihood(wins, th);
    double t = 1.0;
    Eigen::VectorXd next = th;
    for (int k = 0; k < 40; ++k) {
      next = th;
      next.tail(n - 1) += t * step;
      if (LogLikelihood(wins, next) >= ll0 - 1e-15 * std::abs(ll0)) break;
      t *= 0.5;
    }
    th = next;
  }
  return th;
}

}  // namespace

AestheticResult AestheticMean(std::span<const double> raw,
                              const AestheticCalibration& cal) {
  if (raw.empty()) {
    throw Error(ErrorCode::kInsufficientData, "no aesthetic view scores");
  }
  if (!(cal.lo < cal.hi)) {
    throw Error(ErrorCode::kInvalidArgument, "aesthetic calibration lo >= hi");
  }
  AestheticResult r;
  double sum = 0.0;
  for (double v : raw) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kShapeContract, "non-finite aesthetic score");
    }
    sum += v;
    r.per_view.push_back(v);
  }
  r.raw_mean = sum / raw.size();
  r.score = {"aes", 100.0 * std::clamp((r.raw_mean - cal.lo) / (cal.hi - cal.lo),
                                       0.0, 1.0)};
  return r;
}

EloResult AestheticElo(std::span<const PairOutcome> outcomes) {
  if (outcomes.empty()) {
    throw Error(ErrorCode::kInsufficientData, "no pairwise outcomes");
  }
  EloResult r;
  for (const PairOutcome& o : outcomes) {
    if (o.model_a == o.model_b) {
      throw Error(ErrorCode::kInvalidArgument,
                  "model compared against itself: " + o.model_a);
    }
    r.models.push_back(o.model_a);
    r.models.push_back(o.model_b);
  }
  std::sort(r.models.begin(), r.models.end());
  r.models.erase(std::unique(r.models.begin(), r.models.end()), r.models.end());
  const int n = static_cast<int>(r.models.size());
  auto index = [&](const std::string& m) {
    return static_cast<int>(
        std::lower_bound(r.models.begin(), r.models.end(), m) -
        r.models.begin());
  };
  Eigen::MatrixXd wins = Eigen::MatrixXd::Zero(n, n);
  for (const PairOutcome& o : outcomes) {
    const int a = index(o.model_a), b = index(o.model_b);
    switch (o.outcome) {
      case Outcome::kAWins: wins(a, b) += 1.0; break;
      case Outcome::kBWins: wins(b, a) += 1.0; break;
      case Outcome::kTie:
        wins(a, b) += 0.5;
        wins(b, a) += 0.5;
        break;
    }
  }
  const Eigen::MatrixXd games = wins + wins.transpose();
  std::vector<int> component(n, -1);
  int n_components = 0;
  for (int i = 0; i < n; ++i) {
    if (component[i] >= 0) continue;
    const std::vector<int> seen = Reachable(games, i);
    for (int j = 0; j < n; ++j) {
      if (seen[j]) component[j] = n_components;
    }
    ++n_components;
  }
  if (n_components > 1) {
    std::string msg = "comparison graph is disconnected:";
    for (int c = 0; c < n_components; ++c) {
      msg += c ? " | {" : " {";
      bool first = true;
      for (int i = 0; i < n; ++i) {
        if (component[i] != c) continue;
        msg += (first ? "" : ", ") + r.models[i];
        first = false;
      }
      msg += "}";
    }
    throw Error(ErrorCode::kDisconnectedGraph, msg);
  }
  if (!StronglyConnected(wins)) {
    r.regularized = true;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && games(i, j) > 0) wins(i, j) += kBradleyTerryPrior;
      }
    }
  }
  Eigen::VectorXd th = FitBradleyTerry(wins);
  th.array() -= th.mean();
  const double lo = th.minCoeff(), hi = th.maxCoeff();
  for (int i = 0; i < n; ++i) {
    const std::string& m = r.models[i];
    r.log_strength[m] = th(i);
    r.elo[m] = 400.0 * th(i) / std::numbers::ln10;
    r.normalized[m] = (hi - lo) > 1e-9 ? 100.0 * ((th(i) - lo) / (hi - lo)) : 50.0;
  }
  return r;
}

}  // namespace eval3d

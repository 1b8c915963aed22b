// eval3d command-line entry point.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eval3d/backends/tensor_file.h"
#include "eval3d/bench/agreement.h"
#include "eval3d/bench/promptset.h"
#include "eval3d/common/error.h"
#include "eval3d/metrics/semantic.h"
#include "eval3d/pipeline/compare.h"
#include "eval3d/pipeline/run_eval.h"

namespace {

constexpr int kExitFatal = 1;

std::vector<std::string> SplitCsv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void PrintScores(const nlohmann::json& report) {
  for (const auto& [name, slot] : report.at("metrics").items()) {
    std::cout << "  " << name << ": ";
    if (slot.is_object()) {
      std::cout << slot.at("value").get<double>();
    } else {
      std::cout << slot.get<std::string>();
    }
    std::cout << "\n";
  }
}

// Pools finite per-vertex variances from .etns tensors or JSON arrays.
std::vector<double> LoadVariances(const std::vector<std::string>& paths) {
  std::vector<double> out;
  for (const std::string& p : paths) {
    if (p.size() > 5 && p.substr(p.size() - 5) == ".etns") {
      const eval3d::Tensor t = eval3d::ReadTensor(p);
      for (float v : t.f32()) out.push_back(v);
    } else {
      std::ifstream in(p);
      if (!in) throw eval3d::Error(eval3d::ErrorCode::kIo, "cannot open " + p);
      for (const auto& v : nlohmann::json::parse(in)) {
        out.push_back(v.is_number() ? v.get<double>() : std::nan(""));
      }
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluation engine for generated 3D assets"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Evaluate one asset from a config");
  std::string config_path, out_dir, metrics_csv;
  bool stub_all = false;
  int views = 0;
  run->add_option("--config", config_path, "Run config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--stub-all", stub_all, "Use deterministic stubs for every backend");
  run->add_option("--views", views, "Override the rig view count")
      ->check(CLI::PositiveNumber);
  run->add_option("--metrics", metrics_csv,
                  "Comma-separated subset of geo,sem,struct,align,aes");

  auto* compare = app.add_subcommand("compare", "Leaderboard over several models");
  std::string manifest_path, compare_out;
  bool compare_stub_all = false;
  compare->add_option("--manifest", manifest_path, "Compare manifest (JSON)")
      ->required();
  compare->add_option("--out", compare_out, "Output directory");
  compare->add_flag("--stub-all", compare_stub_all,
                    "Use deterministic stubs for every backend");

  auto* bench = app.add_subcommand("bench", "Benchmark utilities");
  bench->require_subcommand(1);
  auto* agreement = bench->add_subcommand("agreement", "Human-alignment statistics");
  std::string scores_path, annotations_path;
  bool drop_uncertain = false;
  agreement->add_option("--scores", scores_path, "Metric scores (JSON lines)")
      ->required();
  agreement->add_option("--annotations", annotations_path,
                        "Human annotations (JSON lines)")
      ->required();
  agreement->add_flag("--drop-uncertain", drop_uncertain,
                      "Drop uncertain labels instead of collapsing them");
  auto* calibrate = bench->add_subcommand(
      "calibrate", "Semantic threshold from pooled per-vertex variances");
  std::vector<std::string> variance_paths;
  double percentile = 70.0;
  calibrate->add_option("--variances", variance_paths,
                        "sem_vertex_variance.etns files or JSON arrays")
      ->required();
  calibrate->add_option("--percentile", percentile, "Percentile")
      ->check(CLI::Range(0.0, 100.0));
  auto* prompts = bench->add_subcommand("prompts", "Validate a prompt set");
  std::string prompts_path;
  prompts->add_option("--prompts", prompts_path, "Prompt set (JSON lines)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      eval3d::RunConfig config = eval3d::LoadRunConfig(config_path);
      eval3d::RunOverrides o;
      if (!out_dir.empty()) o.output_dir = out_dir;
      o.stub_all = stub_all;
      if (views > 0) o.views = views;
      if (!metrics_csv.empty()) o.metrics = SplitCsv(metrics_csv);
      eval3d::ApplyOverrides(config, o);
      const eval3d::RunOutcome r = eval3d::RunEval(config);
      std::cout << "report: " << (config.output_dir / "report.json").string()
                << " (" << r.report.at("status").get<std::string>() << ")\n";
      PrintScores(r.report);
      for (const auto& w : r.report.at("warnings")) {
        std::cerr << "warning: " << w.get<std::string>() << "\n";
      }
      return r.exit_code;
    }
    if (compare->parsed()) {
      eval3d::CompareManifest m = eval3d::LoadCompareManifest(manifest_path);
      if (!compare_out.empty()) m.output_dir = compare_out;
      m.stub_all = m.stub_all || compare_stub_all;
      const eval3d::Leaderboard board = eval3d::CompareModels(m);
      std::cout << board.ToText();
      std::cout << "leaderboard: " << (m.output_dir / "leaderboard.json").string()
                << "\n";
      return board.partial ? 2 : 0;
    }
    if (agreement->parsed()) {
      const auto scores = eval3d::LoadScores(scores_path);
      const auto annotations = eval3d::LoadAnnotations(annotations_path);
      const nlohmann::json report = eval3d::AgreementReport(
          scores, annotations,
          drop_uncertain ? eval3d::LabelScheme::kDropUncertain
                         : eval3d::LabelScheme::kCollapseUncertain);
      std::cout << report.dump(2) << "\n";
      return 0;
    }
    if (calibrate->parsed()) {
      const std::vector<double> v = LoadVariances(variance_paths);
      std::cout << eval3d::CalibrateSemanticThreshold(v, percentile) << "\n";
      return 0;
    }
    if (prompts->parsed()) {
      const eval3d::PromptSet set = eval3d::LoadPromptSet(prompts_path);
      std::cout << set.records.size() << " prompts: "
                << set.CountCategory(eval3d::PromptCategory::kSingleObject)
                << " single-object, "
                << set.CountCategory(eval3d::PromptCategory::kMultiObject)
                << " multi-object\n";
      return 0;
    }
  } catch (const eval3d::Error& e) {
    std::cerr << "error [" << eval3d::ErrorCodeName(e.code()) << "]: " << e.what()
              << "\n";
    return kExitFatal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitFatal;
}

#include "eval3d/pipeline/run_eval.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>

#include "eval3d/assets/mesh_io.h"
#include "eval3d/backends/tensor_file.h"
#include "eval3d/common/error.h"
#include "eval3d/common/png_io.h"
#include "eval3d/localize/heatmap.h"
#include "eval3d/metrics/depth_normal.h"
#include "eval3d/raster/buffer_export.h"
#include "eval3d/raster/rasterizer.h"
#include "eval3d/raster/visibility.h"

#ifndef EVAL3D_VERSION
#define EVAL3D_VERSION "0.0.0"
#endif

namespace eval3d {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr float kNaNf = std::numeric_limits<float>::quiet_NaN();
constexpr int kMontageCell = 128;
constexpr int kMontageColumns = 4;
constexpr size_t kMontageMaxViews = 12;

std::string ViewFileName(int id) { return "view_" + std::to_string(id) + ".png"; }

std::string FormatDeg(double deg) {
  std::ostringstream os;
  if (deg == std::round(deg)) {
    os << static_cast<long long>(deg);
  } else {
    os << deg;
  }
  return os.str();
}

std::string Iso8601Now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// Nearest-neighbour downsample into a square cell.
RgbImage Shrink(const RgbImage& img, int size) {
  RgbImage out(size, size, Rgb8{255, 255, 255});
  if (img.empty()) return out;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      out.at(x, y) = img.at(x * img.width() / size, y * img.height() / size);
    }
  }
  return out;
}

RgbImage Montage(const std::vector<RgbImage>& cells, int columns) {
  const int n = static_cast<int>(cells.size());
  const int cols = std::max(1, std::min(columns, n));
  const int rows = std::max(1, (n + cols - 1) / cols);
  RgbImage out(cols * kMontageCell, rows * kMontageCell, Rgb8{255, 255, 255});
  for (int i = 0; i < n; ++i) {
    const RgbImage cell = Shrink(cells[i], kMontageCell);
    const int ox = (i % cols) * kMontageCell, oy = (i / cols) * kMontageCell;
    for (int y = 0; y < kMontageCell; ++y) {
      for (int x = 0; x < kMontageCell; ++x) out.at(ox + x, oy + y) = cell.at(x, y);
    }
  }
  return out;
}

// Indices of up to kMontageMaxViews evenly spaced views.
bool MontagePick(size_t k, size_t count) {
  if (count <= kMontageMaxViews) return true;
  return k % (count / kMontageMaxViews) == 0 &&
         k / (count / kMontageMaxViews) < kMontageMaxViews;
}

std::vector<CameraView> SubsetViews(const std::vector<CameraView>& rig, int n) {
  if (n <= 0 || n == static_cast<int>(rig.size())) return rig;
  if (n > static_cast<int>(rig.size())) {
    throw Error(ErrorCode::kInvalidArgument,
                "rig has " + std::to_string(rig.size()) + " views, " +
                    std::to_string(n) + " requested");
  }
  return SubsampleRig(rig, n);
}

Tensor VectorTensor(const std::vector<double>& v) {
  const uint64_t n = v.size();
  return Tensor({n}, std::vector<float>(v.begin(), v.end()));
}

// Supplies RGB views: files from rgb_dir, else proxy renders if allowed.
class RgbSource {
 public:
  RgbSource(const RunConfig& config, const TriMesh& mesh)
      : config_(config), mesh_(mesh) {}

  bool available() const {
    return config_.rgb_dir.has_value() || config_.allow_proxy_rgb;
  }

  static constexpr const char* kUnavailable = "no RGB views";

  // Every rig view must have a file of the rig resolution.
  void CheckDirectory(const std::vector<CameraView>& rig) const {
    if (!config_.rgb_dir) return;
    if (!fs::is_directory(*config_.rgb_dir)) {
      throw Error(ErrorCode::kIo,
                  "rgb_dir " + config_.rgb_dir->string() + " is not a directory");
    }
    for (const CameraView& v : rig) {
      if (!fs::exists(*config_.rgb_dir / ViewFileName(v.id))) {
        throw Error(ErrorCode::kInvalidArgument,
                    "rgb_dir lacks " + ViewFileName(v.id) + " for a " +
                        std::to_string(rig.size()) + "-view rig");
      }
    }
  }

  RgbImage ForView(const CameraView& view, const RenderBuffers* buffers) const {
    if (config_.rgb_dir) return Load(*config_.rgb_dir / ViewFileName(view.id), view);
    if (!config_.allow_proxy_rgb) {
      throw Error(ErrorCode::kInvalidArgument, kUnavailable);
    }
    if (buffers) return ColorizeNormals(*buffers);
    return ColorizeNormals(Rasterize(mesh_, view));
  }

  // Image at an arbitrary pose: a matching rig view, struct_az<deg>.png, or
  // a proxy render.
  RgbImage ForPose(const CameraView& view, int rig_views) const {
    if (config_.rgb_dir) {
      const double step = 360.0 / rig_views;
      const double idx = view.azimuth_deg / step;
      if (view.elevation_deg == config_.rig.elevation_deg &&
          std::abs(idx - std::round(idx)) < 1e-9) {
        const int id = static_cast<int>(std::lround(idx)) % rig_views;
        return Load(*config_.rgb_dir / ViewFileName(id), view);
      }
      const fs::path extra =
          *config_.rgb_dir / ("struct_az" + FormatDeg(view.azimuth_deg) + ".png");
      if (fs::exists(extra)) return Load(extra, view);
      if (!config_.allow_proxy_rgb) {
        throw Error(ErrorCode::kInvalidArgument,
                    "no RGB view at azimuth " + FormatDeg(view.azimuth_deg) +
                        ", elevation " + FormatDeg(view.elevation_deg));
      }
    } else if (!config_.allow_proxy_rgb) {
      throw Error(ErrorCode::kInvalidArgument, kUnavailable);
    }
    return ColorizeNormals(Rasterize(mesh_, view));
  }

 private:
  RgbImage Load(const fs::path& path, const CameraView& view) const {
    RgbImage img = ReadPngRgb(path);
    if (img.width() != view.width || img.height() != view.height) {
      throw Error(ErrorCode::kShapeContract,
                  path.filename().string() + " is " + std::to_string(img.width()) +
                      "x" + std::to_string(img.height()) + ", rig renders " +
                      std::to_string(view.width) + "x" +
                      std::to_string(view.height));
    }
    return img;
  }

  const RunConfig& config_;
  const TriMesh& mesh_;
};

class Pipeline {
 public:
  explicit Pipeline(const RunConfig& config) : config_(config) {}

  RunOutcome Run();

 private:
  struct Slot {
    std::optional<double> value;
    std::string skipped;
    json details = json::object();
  };

  void Setup();
  BackendSpec Spec(BackendKind kind);
  fs::path Artifact(const std::string& rel, const std::string& kind);
  void WriteTensorArtifact(const std::string& rel, const Tensor& t);
  void WritePngArtifact(const std::string& rel, const RgbImage& img);
  void RunMetric(const std::string& name, const std::function<void(Slot&)>& fn);
  void Time(const std::string& stage, Clock::time_point start);

  void Geo(Slot& slot);
  void Sem(Slot& slot);
  void Struct(Slot& slot);
  void Align(Slot& slot);
  void Aes(Slot& slot);

  json Report(const std::string& status) const;

  const RunConfig& config_;
  TriMesh mesh_;
  std::vector<CameraView> rig_;
  std::optional<RgbSource> rgb_;
  std::string stage_;
  std::map<std::string, Slot> slots_;
  std::map<std::string, json> reported_backends_;
  std::map<std::string, std::string> artifacts_;  // rel path -> kind
  std::vector<std::string> warnings_;
  json timings_ = {{"stages", json::object()}};
};

void Pipeline::Time(const std::string& stage, Clock::time_point start) {
  timings_["stages"][stage] =
      std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path Pipeline::Artifact(const std::string& rel, const std::string& kind) {
  const fs::path path = config_.output_dir / rel;
  fs::create_directories(path.parent_path());
  artifacts_[rel] = kind;
  return path;
}

void Pipeline::WriteTensorArtifact(const std::string& rel, const Tensor& t) {
  WriteTensor(Artifact(rel, "tensor"), t);
}

void Pipeline::WritePngArtifact(const std::string& rel, const RgbImage& img) {
  WritePngRgb(Artifact(rel, "png"), img);
}

BackendSpec Pipeline::Spec(BackendKind kind) {
  BackendSpec spec = config_.backends.Get(kind);
  spec.work_root = config_.output_dir / "jobs";
  spec.keep_jobs = config_.keep_jobs;
  spec.seed = config_.seed;
  const std::string name(KindName(kind));
  const std::string identity = spec.Identity(kind);
  spec.on_identity = [this, name, identity](const json& backend) {
    reported_backends_[name] = {{"identity", identity}, {"reported", backend}};
  };
  return spec;
}

void Pipeline::Setup() {
  stage_ = "output directory";
  fs::create_directories(config_.output_dir);
  stage_ = "load mesh";
  mesh_ = PrepareMesh(LoadMesh(config_.mesh));
  stage_ = "build rig";
  rig_ = BuildRig(config_.rig);
  std::ofstream(Artifact("rig.json", "json")) << RigToJson(rig_).dump(2) << "\n";
  stage_ = "rgb views";
  rgb_.emplace(config_, mesh_);
  rgb_->CheckDirectory(rig_);
}

void Pipeline::RunMetric(const std::string& name,
                         const std::function<void(Slot&)>& fn) {
  Slot& slot = slots_[name];
  if (!config_.metrics.enabled.count(name)) {
    slot.skipped = "skipped: not requested";
    return;
  }
  for (BackendKind kind : RequiredBackends(name)) {
    if (!config_.backends.Has(kind)) {
      slot.skipped = "skipped: no " + std::string(KindName(kind)) + " backend";
      return;
    }
  }
  const auto start = Clock::now();
  stage_ = name;
  try {
    fn(slot);
  } catch (const std::exception& e) {
    slot.value.reset();
    slot.skipped = "skipped: " + stage_ + ": " + e.what();
  }
  Time(name, start);
}

void Pipeline::Geo(Slot& slot) {
  if (!rgb_->available()) throw Error(ErrorCode::kInvalidArgument, RgbSource::kUnavailable);
  const GeoConfig& cfg = config_.metrics.geo;
  const std::vector<CameraView> views = SubsetViews(rig_, config_.metrics.geo_views);
  const BackendSpec depth = Spec(BackendKind::kDepth);
  GeoAccumulator acc(cfg);
  GeoHeatAccumulator heat(mesh_.vertex_count());
  VisibilityTable vis(mesh_.vertex_count(), views.size());
  const HeatRange range =
      config_.geo_heat_range.value_or(DefaultGeoHeatRange(cfg.delta_norm_deg));
  std::vector<RgbImage> normal_cells, angle_cells;
  json per_view = json::array();
  for (size_t k = 0; k < views.size(); ++k) {
    const CameraView& view = views[k];
    stage_ = "geo/render";
    const RenderBuffers buffers = Rasterize(mesh_, view);
    vis.SetView(k, VisibleInView(mesh_, view, buffers));
    stage_ = "geo/rgb";
    const RgbImage rgb = rgb_->ForView(view, &buffers);
    stage_ = "geo/depth backend";
    const DepthPrediction pred =
        PredictDepth(depth, rgb, view, depth.is_stub() ? &buffers.depth : nullptr);
    if (pred.depth.width() != view.width || pred.depth.height() != view.height) {
      throw Error(ErrorCode::kShapeContract,
                  "depth is " + std::to_string(pred.depth.width()) + "x" +
                      std::to_string(pred.depth.height()) + ", view is " +
                      std::to_string(view.width) + "x" +
                      std::to_string(view.height));
    }
    stage_ = "geo/align depth";
    json entry = {{"view_id", view.id}};
    Grid<float> angles(view.width, view.height, kNaNf);
    try {
      const DepthAlignment aligned = AlignDepthAuto(
          pred.depth, buffers.depth, buffers.opacity, pred.is_disparity);
      stage_ = "geo/depth to normal";
      const Grid<Eigen::Vector3f> normals =
          DepthToNormal(aligned.depth, view.intrinsics, buffers.opacity);
      angles = AngularDifferenceMap(buffers.normal, normals, buffers.opacity);
      entry["scale"] = aligned.scale;
      entry["shift"] = aligned.shift;
      entry["reciprocal"] = aligned.used_reciprocal;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInsufficientData) throw;
      warnings_.push_back("geo view " + std::to_string(view.id) + ": " + e.what());
      entry["skipped"] = e.what();
    }
    acc.AddAngleMap(angles);
    entry["valid_pixels"] = acc.per_view().back().valid;
    entry["inlier_pixels"] = acc.per_view().back().inliers;
    per_view.push_back(entry);
    stage_ = "geo/localize";
    const Grid<float> cosine = CosineDistanceMap(angles);
    heat.AddView(mesh_, view, cosine, vis, k);
    if (config_.write_view_evidence) {
      WriteTensorArtifact("evidence/geo/angle_view_" + std::to_string(view.id) +
                              ".etns",
                          GridToTensor(angles));
    }
    if (MontagePick(k, views.size())) {
      normal_cells.push_back(ColorizeNormals(buffers));
      angle_cells.push_back(ColorizeHeatMap(cosine, range));
    }
  }
  stage_ = "geo/score";
  slot.value = acc.Finish().value;
  int64_t valid = 0, inliers = 0;
  for (const GeoViewStats& s : acc.per_view()) {
    valid += s.valid;
    inliers += s.inliers;
  }
  stage_ = "geo/artifacts";
  const VertexHeat h = heat.Finish();
  std::vector<float> flat;
  for (size_t v = 0; v < h.size(); ++v) {
    flat.push_back(h.has_data[v] ? static_cast<float>(h.mean[v]) : kNaNf);
    flat.push_back(h.has_data[v] ? static_cast<float>(h.max[v]) : kNaNf);
  }
  WriteTensorArtifact("evidence/geo_vertex_heat.etns",
                      Tensor({static_cast<uint64_t>(h.size()), 2}, std::move(flat)));
  ExportHeatmapMesh(mesh_, h.mean, h.has_data, range,
                    Artifact("heatmaps/geo_mean.ply", "ply"));
  ExportHeatmapMesh(mesh_, h.max, h.has_data, range,
                    Artifact("heatmaps/geo_max.ply", "ply"));
  WritePngArtifact("summary/normals.png", Montage(normal_cells, kMontageColumns));
  WritePngArtifact("summary/geo_cosine_distance.png",
                   Montage(angle_cells, kMontageColumns));
  slot.details = {
      {"delta_norm_deg", cfg.delta_norm_deg},
      {"pooling", cfg.pooling == GeoPooling::kPooled ? "pooled" : "per_view_mean"},
      {"views", views.size()},
      {"valid_pixels", valid},
      {"inlier_pixels", inliers},
      {"heat_range", {range.lo, range.hi}},
      {"per_view", per_view}};
}

void Pipeline::Sem(Slot& slot) {
  const SemConfig& cfg = config_.metrics.sem;
  if (!cfg.delta_dino) {
    throw Error(ErrorCode::kInvalidArgument, "delta_dino not configured");
  }
  if (!rgb_->available()) throw Error(ErrorCode::kInvalidArgument, RgbSource::kUnavailable);
  const std::vector<CameraView> views = SubsetViews(rig_, config_.metrics.sem_views);
  const BackendSpec features = Spec(BackendKind::kFeatures);
  stage_ = "sem/visibility";
  const VisibilityTable vis = ComputeVisibility(mesh_, views);
  VertexFeatureAccumulator acc(mesh_, vis, cfg.min_visibility);
  acc.CheckEligible();
  size_t channels = 0;
  for (size_t k = 0; k < views.size(); ++k) {
    stage_ = "sem/rgb";
    const RgbImage rgb = rgb_->ForView(views[k], nullptr);
    stage_ = "sem/features backend";
    const Tensor f = ExtractFeatures(features, rgb, views[k]);
    channels = f.dims()[0];
    stage_ = "sem/fuse";
    acc.AddView(k, views[k], f);
  }
  stage_ = "sem/score";
  const std::vector<double> var = acc.MeanVariances();
  const SemResult r = SemanticFromVariances(var, cfg);
  slot.value = r.score.value;
  stage_ = "sem/artifacts";
  const OutlierMask outliers = SemanticOutliers(var, *cfg.delta_dino);
  const uint64_t n_vertices = var.size();
  WriteTensorArtifact(
      "evidence/sem_vertex_variance.etns",
      Tensor({n_vertices}, std::vector<float>(var.begin(), var.end())));
  WriteTensorArtifact(
      "evidence/sem_outliers.etns",
      Tensor({n_vertices}, outliers.mask));
  const HeatRange range =
      config_.sem_heat_range.value_or(DefaultSemHeatRange(*cfg.delta_dino));
  const VertexHeat h = HeatFromVariances(var);
  ExportHeatmapMesh(mesh_, h.mean, h.has_data, range,
                    Artifact("heatmaps/sem_variance.ply", "ply"));
  std::vector<double> mask_heat(outliers.mask.begin(), outliers.mask.end());
  ExportHeatmapMesh(mesh_, mask_heat, h.has_data, {0.0, 1.0},
                    Artifact("heatmaps/sem_outliers.ply", "ply"));
  slot.details = {{"delta_dino", *cfg.delta_dino},
                  {"min_visibility", cfg.min_visibility},
                  {"views", views.size()},
                  {"channels", channels},
                  {"included_vertices", r.included},
                  {"excluded_vertices", var.size() - r.included},
                  {"outlier_vertices", outliers.outliers},
                  {"heat_range", {range.lo, range.hi}}};
}

void Pipeline::Struct(Slot& slot) {
  const StructConfig& cfg = config_.metrics.structural;
  const std::vector<double> targets = TargetAzimuths(cfg);
  const double elevation = cfg.elevation_deg.value_or(config_.rig.elevation_deg);
  const BackendSpec nvs = Spec(BackendKind::kNvs);
  const BackendSpec perceptual = Spec(BackendKind::kPerceptual);
  std::map<double, CameraView> poses;
  std::map<double, RgbImage> renders;
  std::vector<double> needed = targets;
  needed.insert(needed.end(), cfg.input_azimuths.begin(), cfg.input_azimuths.end());
  int next_id = 0;
  for (double az : needed) {
    if (poses.count(az)) continue;
    stage_ = "struct/rgb";
    const CameraView view = MakeView(next_id++, az, elevation, config_.rig);
    renders.emplace(az, rgb_->ForPose(view, config_.rig.n_views));
    poses.emplace(az, view);
  }
  std::map<std::string, RgbImage> synthesized;
  const NvsFn nvs_fn = [&](const RgbImage& src, double a, double t) {
    stage_ = "struct/nvs backend";
    RgbImage out = SynthesizeView(nvs, src, poses.at(a), poses.at(t),
                                  nvs.is_stub() ? &renders.at(t) : nullptr);
    synthesized[StructPairTag(a, t)] = out;
    return out;
  };
  const PerceptualFn perceptual_fn = [&](const RgbImage& a, const RgbImage& b,
                                         const std::string& tag) {
    stage_ = "struct/perceptual backend";
    return PerceptualDistance(perceptual, a, b, tag);
  };
  const StructResult r = StructuralConsistency(renders, nvs_fn, perceptual_fn, cfg);
  slot.value = r.score.value;
  stage_ = "struct/artifacts";
  std::vector<float> flat;
  for (const auto& row : r.distances) flat.insert(flat.end(), row.begin(), row.end());
  WriteTensorArtifact("evidence/struct_distances.etns",
                      Tensor({static_cast<uint64_t>(r.distances.size()),
                              static_cast<uint64_t>(targets.size())},
                             std::move(flat)));
  std::vector<RgbImage> cells;
  for (double t : targets) cells.push_back(renders.at(t));
  for (double a : cfg.input_azimuths) {
    for (double t : targets) cells.push_back(synthesized.at(StructPairTag(a, t)));
  }
  WritePngArtifact("summary/struct_nvs.png",
                   Montage(cells, static_cast<int>(targets.size())));
  slot.details = {{"input_azimuths", r.input_azimuths},
                  {"target_azimuths", r.target_azimuths},
                  {"elevation_deg", elevation},
                  {"distances", r.distances},
                  {"mean_similarity", r.mean_similarity}};
}

void Pipeline::Align(Slot& slot) {
  if (config_.prompt.empty()) throw Error(ErrorCode::kInvalidArgument, "no prompt");
  if (!rgb_->available()) throw Error(ErrorCode::kInvalidArgument, RgbSource::kUnavailable);
  const AlignConfig& cfg = config_.metrics.align;
  const std::vector<CameraView> views = SubsetViews(rig_, cfg.n_views);
  const BackendSpec qagen = Spec(BackendKind::kQaGen);
  const BackendSpec vqa = Spec(BackendKind::kVqa);
  stage_ = "align/qagen backend";
  const std::vector<QAItem> qa =
      GenerateQuestions(qagen, config_.prompt, config_.scene_graph);
  if (qa.empty()) {
    throw Error(ErrorCode::kInsufficientData, "question generator returned no questions");
  }
  AnswerMatrix answers(qa.size(),
                       std::vector<std::optional<std::string>>(views.size()));
  for (size_t v = 0; v < views.size(); ++v) {
    stage_ = "align/rgb";
    const RgbImage rgb = rgb_->ForView(views[v], nullptr);
    stage_ = "align/vqa backend";
    for (size_t j = 0; j < qa.size(); ++j) {
      answers[j][v] = AnswerQuestion(vqa, rgb, views[v], qa[j]);
    }
  }
  stage_ = "align/score";
  const AlignResult r = TextAlignment(qa, answers, cfg);
  slot.value = r.score.value;
  stage_ = "align/artifacts";
  std::vector<uint8_t> flat;
  for (const auto& row : r.correct) flat.insert(flat.end(), row.begin(), row.end());
  WriteTensorArtifact("evidence/align_correct.etns",
                      Tensor({static_cast<uint64_t>(qa.size()),
                              static_cast<uint64_t>(views.size())},
                             std::move(flat)));
  json questions = json::array();
  for (size_t j = 0; j < qa.size(); ++j) {
    json a = json::array();
    for (const auto& ans : answers[j]) a.push_back(ans ? json(*ans) : json(nullptr));
    json q = QaItemToJson(qa[j]);
    q["passed"] = static_cast<bool>(r.passed[j]);
    q["answers"] = a;
    questions.push_back(q);
  }
  std::vector<int> view_ids;
  for (const CameraView& v : views) view_ids.push_back(v.id);
  slot.details = {{"n_views", cfg.n_views},
                  {"adjacency_radius", cfg.adjacency_radius},
                  {"view_ids", view_ids},
                  {"questions", questions}};
}

void Pipeline::Aes(Slot& slot) {
  if (!rgb_->available()) throw Error(ErrorCode::kInvalidArgument, RgbSource::kUnavailable);
  const std::vector<CameraView> views = SubsetViews(rig_, config_.metrics.aes_views);
  const BackendSpec aesthetic = Spec(BackendKind::kAesthetic);
  std::vector<double> raw;
  json per_view = json::array();
  for (const CameraView& view : views) {
    stage_ = "aes/rgb";
    const RgbImage rgb = rgb_->ForView(view, nullptr);
    stage_ = "aes/aesthetic backend";
    raw.push_back(AestheticScore(aesthetic, rgb, view));
    per_view.push_back({{"view_id", view.id}, {"raw", raw.back()}});
  }
  stage_ = "aes/score";
  const AestheticResult r = AestheticMean(raw, config_.metrics.aes_calibration);
  slot.value = r.score.value;
  stage_ = "aes/artifacts";
  WriteTensorArtifact("evidence/aes_per_view.etns", VectorTensor(raw));
  slot.details = {{"views", views.size()},
                  {"raw_mean", r.raw_mean},
                  {"lo", config_.metrics.aes_calibration.lo},
                  {"hi", config_.metrics.aes_calibration.hi},
                  {"per_view", per_view}};
}

json Pipeline::Report(const std::string& status) const {
  json metrics = json::object();
  for (const std::string& name : kMetricNames) {
    auto it = slots_.find(name);
    if (it == slots_.end()) {
      metrics[name] = "skipped: run aborted";
    } else if (it->second.value) {
      metrics[name] = {{"value", *it->second.value}, {"details", it->second.details}};
    } else {
      metrics[name] = it->second.skipped;
    }
  }
  json artifacts = json::array();
  for (const auto& [rel, kind] : artifacts_) {
    std::error_code ec;
    const auto bytes = fs::file_size(config_.output_dir / rel, ec);
    if (ec) continue;
    artifacts.push_back({{"path", rel}, {"kind", kind}, {"bytes", bytes}});
  }
  json asset = json::object();
  if (!mesh_.vertices.empty()) {
    asset = {{"vertices", mesh_.vertex_count()}, {"faces", mesh_.face_count()}};
  }
  return {{"format", kReportFormat},
          {"tool", {{"name", "eval3d"}, {"version", EVAL3D_VERSION}}},
          {"status", status},
          {"config", RunConfigToJson(config_)},
          {"asset", asset},
          {"metrics", metrics},
          {"backends", reported_backends_},
          {"artifacts", artifacts},
          {"warnings", warnings_},
          {"timings", timings_}};
}

RunOutcome Pipeline::Run() {
  const auto start = Clock::now();
  timings_["started_at"] = Iso8601Now();
  RunOutcome out;
  std::string status = "complete";
  try {
    const auto setup_start = Clock::now();
    Setup();
    Time("setup", setup_start);
  } catch (const std::exception& e) {
    const std::string reason = "skipped: " + stage_ + ": " + e.what();
    for (const std::string& name : kMetricNames) slots_[name].skipped = reason;
    warnings_.push_back(std::string("fatal: ") + stage_ + ": " + e.what());
    status = "failed";
    out.exit_code = 1;
  }
  if (out.exit_code == 0) {
    RunMetric("geo", [this](Slot& s) { Geo(s); });
    RunMetric("sem", [this](Slot& s) { Sem(s); });
    RunMetric("struct", [this](Slot& s) { Struct(s); });
    RunMetric("align", [this](Slot& s) { Align(s); });
    RunMetric("aes", [this](Slot& s) { Aes(s); });
    for (const std::string& name : config_.metrics.enabled) {
      if (!slots_[name].value) {
        status = "partial";
        out.exit_code = 2;
      }
    }
    if (!config_.keep_jobs) {
      std::error_code ec;
      fs::remove(config_.output_dir / "jobs", ec);  // only when empty
    }
  }
  for (const auto& [name, slot] : slots_) out.scores[name] = slot.value;
  timings_["total_s"] = std::chrono::duration<double>(Clock::now() - start).count();
  out.report = Report(status);
  std::error_code ec;
  fs::create_directories(config_.output_dir, ec);
  std::ofstream f(config_.output_dir / "report.json");
  f << out.report.dump(2) << "\n";
  if (!f) {
    throw Error(ErrorCode::kIo,
                "cannot write " + (config_.output_dir / "report.json").string());
  }
  return out;
}

}  // namespace

RunOutcome RunEval(const RunConfig& config) { return Pipeline(config).Run(); }

std::optional<RgbImage> FrontViewImage(const RunConfig& config) {
  const TriMesh mesh = PrepareMesh(LoadMesh(config.mesh));
  RgbSource source(config, mesh);
  if (!source.available()) return std::nullopt;
  const CameraView view = MakeView(0, 0.0, config.rig.elevation_deg, config.rig);
  return source.ForPose(view, config.rig.n_views);
}

json StripTimings(const json& report) {
  json out = report;
  out.erase("timings");
  return out;
}

}  // namespace eval3d

#include "eval3d/pipeline/run_config.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "eval3d/backends/stubs.h"
#include "eval3d/common/error.h"

namespace eval3d {
namespace {

using nlohmann::json;

[[noreturn]] void FieldError(const std::string& field, const std::string& msg) {
  throw Error(ErrorCode::kParse, "config field '" + field + "': " + msg);
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

template <typename T>
T Get(const json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    FieldError(where + "." + key, e.what());
  }
}

HeatRange ParseRange(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    FieldError(where, "expected [lo, hi]");
  }
  HeatRange r{j[0].get<double>(), j[1].get<double>()};
  if (!(r.lo < r.hi)) FieldError(where, "lo must be below hi");
  return r;
}

void ParseMetrics(const json& j, MetricsConfig& m) {
  if (!j.is_object()) FieldError("metrics", "expected an object");
  if (j.contains("enabled")) {
    m.enabled.clear();
    for (const json& e : j.at("enabled")) {
      const std::string name = e.get<std::string>();
      if (std::find(kMetricNames.begin(), kMetricNames.end(), name) ==
          kMetricNames.end()) {
        FieldError("metrics.enabled", "unknown metric '" + name + "'");
      }
      m.enabled.insert(name);
    }
  }
  const json empty = json::object();
  const json& geo = j.contains("geo") ? j.at("geo") : empty;
  m.geo.delta_norm_deg = Get(geo, "delta_norm_deg", "metrics.geo", 23.0);
  const std::string pooling = Get<std::string>(geo, "pooling", "metrics.geo", "pooled");
  if (pooling == "pooled") {
    m.geo.pooling = GeoPooling::kPooled;
  } else if (pooling == "per_view_mean") {
    m.geo.pooling = GeoPooling::kPerViewMean;
  } else {
    FieldError("metrics.geo.pooling", "expected pooled or per_view_mean");
  }
  m.geo_views = Get(geo, "views", "metrics.geo", 0);

  const json& sem = j.contains("sem") ? j.at("sem") : empty;
  if (sem.contains("delta_dino") && !sem.at("delta_dino").is_null()) {
    m.sem.delta_dino = Get(sem, "delta_dino", "metrics.sem", 0.0);
  }
  m.sem.min_visibility = Get(sem, "min_visibility", "metrics.sem", 5);
  m.sem_views = Get(sem, "views", "metrics.sem", 0);

  const json& st = j.contains("struct") ? j.at("struct") : empty;
  m.structural.input_azimuths = Get(st, "input_azimuths", "metrics.struct",
                                    std::vector<double>{0.0, 90.0});
  m.structural.target_interval = Get(st, "target_interval", "metrics.struct", 90.0);
  if (st.contains("elevation_deg") && !st.at("elevation_deg").is_null()) {
    m.structural.elevation_deg = Get(st, "elevation_deg", "metrics.struct", 0.0);
  }

  const json& al = j.contains("align") ? j.at("align") : empty;
  m.align.n_views = Get(al, "n_views", "metrics.align", 12);
  m.align.adjacency_radius = Get(al, "adjacency_radius", "metrics.align", 1);

  const json& aes = j.contains("aes") ? j.at("aes") : empty;
  m.aes_views = Get(aes, "views", "metrics.aes", 12);
  m.aes_calibration.lo = Get(aes, "lo", "metrics.aes", -2.0);
  m.aes_calibration.hi = Get(aes, "hi", "metrics.aes", 2.0);

  try {
    ValidateGeoConfig(m.geo);
    ValidateSemConfig(m.sem);
    ValidateStructConfig(m.structural);
    ValidateAlignConfig(m.align);
  } catch (const Error& e) {
    FieldError("metrics", e.what());
  }
  if (!(m.aes_calibration.lo < m.aes_calibration.hi)) {
    FieldError("metrics.aes", "lo must be below hi");
  }
}

}  // namespace

BackendSpec ParseBackendSpec(BackendKind kind, const json& j,
                             const std::filesystem::path& base_dir) {
  const std::string where = std::string("backends.") + std::string(KindName(kind));
  BackendSpec spec;
  spec.timeout = DefaultBackendTimeout();
  if (j.is_string()) {
    if (j.get<std::string>() != "stub") FieldError(where, "expected \"stub\"");
    spec.stub_script = json{{std::string(KindName(kind)), json::object()}};
    return spec;
  }
  if (!j.is_object()) FieldError(where, "expected \"stub\" or an object");
  if (j.contains("stub")) {
    const json& s = j.at("stub");
    if (!s.is_object()) FieldError(where + ".stub", "expected an object");
    spec.stub_script = json{{std::string(KindName(kind)), s}};
  } else if (j.contains("command")) {
    const json& c = j.at("command");
    if (c.is_string()) {
      spec.command = {c.get<std::string>()};
    } else if (c.is_array() && !c.empty()) {
      for (const json& a : c) {
        if (!a.is_string()) FieldError(where + ".command", "expected strings");
        spec.command.push_back(a.get<std::string>());
      }
    } else {
      FieldError(where + ".command", "expected a string or non-empty array");
    }
    // Resolve a relative executable path that exists next to the config.
    const std::filesystem::path exe = Resolve(base_dir, spec.command[0]);
    if (spec.command[0].find('/') != std::string::npos &&
        std::filesystem::exists(exe)) {
      spec.command[0] = exe.string();
    }
  } else {
    FieldError(where, "needs \"stub\" or \"command\"");
  }
  if (j.contains("timeout_s")) {
    const int t = Get(j, "timeout_s", where, 0);
    if (t <= 0) FieldError(where + ".timeout_s", "must be positive");
    spec.timeout = std::chrono::seconds(t);
  }
  return spec;
}

RunConfig ParseRunConfig(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) FieldError("<root>", "expected an object");
  RunConfig c;
  if (!j.contains("mesh") || !j.at("mesh").is_string()) {
    FieldError("mesh", "required path");
  }
  c.mesh = Resolve(base_dir, j.at("mesh").get<std::string>());
  if (j.contains("rgb_dir") && !j.at("rgb_dir").is_null()) {
    c.rgb_dir = Resolve(base_dir, Get<std::string>(j, "rgb_dir", "", ""));
  }
  c.prompt = Get<std::string>(j, "prompt", "", "");
  c.prompt_id = Get<std::string>(j, "prompt_id", "", c.prompt);
  c.model_id = Get<std::string>(j, "model_id", "", "");
  if (j.contains("scene_graph")) c.scene_graph = j.at("scene_graph");
  if (j.contains("rig")) {
    const json& r = j.at("rig");
    c.rig.n_views = Get(r, "n_views", "rig", c.rig.n_views);
    c.rig.elevation_deg = Get(r, "elevation_deg", "rig", c.rig.elevation_deg);
    c.rig.distance = Get(r, "distance", "rig", c.rig.distance);
    c.rig.vfov_deg = Get(r, "vfov_deg", "rig", c.rig.vfov_deg);
    c.rig.resolution = Get(r, "resolution", "rig", c.rig.resolution);
    c.rig.near = Get(r, "near", "rig", c.rig.near);
    c.rig.far = Get(r, "far", "rig", c.rig.far);
  }
  if (c.rig.n_views < 1) FieldError("rig.n_views", "must be >= 1");
  if (c.rig.resolution < 8) FieldError("rig.resolution", "must be >= 8");
  if (!(c.rig.near > 0 && c.rig.near < c.rig.far)) {
    FieldError("rig", "need 0 < near < far");
  }
  if (c.rig.distance - std::sqrt(3.0) <= c.rig.near) {
    FieldError("rig.distance", "camera must sit outside the normalized asset");
  }
  if (j.contains("metrics")) ParseMetrics(j.at("metrics"), c.metrics);
  c.output_dir = Resolve(
      base_dir, Get<std::string>(j, "output_dir", "", c.output_dir.string()));
  c.seed = Get<int64_t>(j, "seed", "", 0);
  c.allow_proxy_rgb = Get(j, "allow_proxy_rgb", "", false);
  c.write_view_evidence = Get(j, "write_view_evidence", "", true);
  c.keep_jobs = Get(j, "keep_jobs", "", false);
  if (j.contains("heat_ranges")) {
    const json& h = j.at("heat_ranges");
    if (h.contains("geo")) c.geo_heat_range = ParseRange(h.at("geo"), "heat_ranges.geo");
    if (h.contains("sem")) c.sem_heat_range = ParseRange(h.at("sem"), "heat_ranges.sem");
  }
  if (j.contains("backends")) {
    const json& b = j.at("backends");
    if (!b.is_object()) FieldError("backends", "expected an object");
    for (const auto& [name, entry] : b.items()) {
      BackendKind kind;
      try {
        kind = ParseKind(name);
      } catch (const Error&) {
        FieldError("backends", "unknown backend kind '" + name + "'");
      }
      c.backends.Set(kind, ParseBackendSpec(kind, entry, base_dir));
    }
  }
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse,
                "config " + path.string() + " is not valid JSON: " + e.what());
  }
  return ParseRunConfig(j, std::filesystem::absolute(path).parent_path());
}

void ApplyOverrides(RunConfig& c, const RunOverrides& o) {
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.views) {
    if (*o.views < 1) {
      throw Error(ErrorCode::kInvalidArgument, "--views must be >= 1");
    }
    c.rig.n_views = *o.views;
  }
  if (o.metrics) {
    std::set<std::string> chosen;
    for (const std::string& m : *o.metrics) {
      if (std::find(kMetricNames.begin(), kMetricNames.end(), m) ==
          kMetricNames.end()) {
        throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + m + "'");
      }
      chosen.insert(m);
    }
    c.metrics.enabled = chosen;
  }
  if (o.stub_all) {
    for (BackendKind kind : AllKinds()) {
      if (c.backends.Has(kind) && c.backends.Get(kind).is_stub()) continue;
      BackendSpec spec;
      spec.timeout = DefaultBackendTimeout();
      spec.stub_script = nlohmann::json{{std::string(KindName(kind)), nlohmann::json::object()}};
      c.backends.Set(kind, spec);
    }
    c.allow_proxy_rgb = true;
    if (!c.metrics.sem.delta_dino) c.metrics.sem.delta_dino = kStubDeltaDino;
  }
}

std::vector<BackendKind> RequiredBackends(const std::string& metric) {
  if (metric == "geo") return {BackendKind::kDepth};
  if (metric == "sem") return {BackendKind::kFeatures};
  if (metric == "struct") return {BackendKind::kNvs, BackendKind::kPerceptual};
  if (metric == "align") return {BackendKind::kQaGen, BackendKind::kVqa};
  if (metric == "aes") return {BackendKind::kAesthetic};
  throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + metric + "'");
}

nlohmann::json RunConfigToJson(const RunConfig& c) {
  json backends = json::object();
  for (const auto& [kind, spec] : c.backends.all()) {
    json b = {{"identity", spec.Identity(kind)},
              {"timeout_s", spec.timeout.count()}};
    if (spec.is_stub()) b["stub"] = spec.stub_script->at(std::string(KindName(kind)));
    backends[std::string(KindName(kind))] = b;
  }
  const MetricsConfig& m = c.metrics;
  json metrics = {
      {"enabled", std::vector<std::string>(m.enabled.begin(), m.enabled.end())},
      {"geo",
       {{"delta_norm_deg", m.geo.delta_norm_deg},
        {"pooling", m.geo.pooling == GeoPooling::kPooled ? "pooled"
                                                         : "per_view_mean"},
        {"views", m.geo_views}}},
      {"sem",
       {{"delta_dino", m.sem.delta_dino ? json(*m.sem.delta_dino) : json(nullptr)},
        {"min_visibility", m.sem.min_visibility},
        {"views", m.sem_views}}},
      {"struct",
       {{"input_azimuths", m.structural.input_azimuths},
        {"target_interval", m.structural.target_interval},
        {"elevation_deg", m.structural.elevation_deg
                              ? json(*m.structural.elevation_deg)
                              : json(nullptr)}}},
      {"align",
       {{"n_views", m.align.n_views},
        {"adjacency_radius", m.align.adjacency_radius}}},
      {"aes",
       {{"views", m.aes_views},
        {"lo", m.aes_calibration.lo},
        {"hi", m.aes_calibration.hi}}}};
  json rig = {{"n_views", c.rig.n_views},     {"elevation_deg", c.rig.elevation_deg},
              {"distance", c.rig.distance},   {"vfov_deg", c.rig.vfov_deg},
              {"resolution", c.rig.resolution}, {"near", c.rig.near},
              {"far", c.rig.far}};
  return {{"mesh", c.mesh.filename().string()},
          {"rgb_dir", c.rgb_dir ? json(c.rgb_dir->filename().string()) : json(nullptr)},
          {"prompt", c.prompt},
          {"prompt_id", c.prompt_id},
          {"model_id", c.model_id},
          {"scene_graph", c.scene_graph},
          {"rig", rig},
          {"metrics", metrics},
          {"backends", backends},
          {"seed", c.seed},
          {"allow_proxy_rgb", c.allow_proxy_rgb},
          {"write_view_evidence", c.write_view_evidence}};
}

}  // namespace eval3d

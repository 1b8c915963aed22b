#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eval3d/backends/protocol.h"

namespace eval3d {

// How to reach one backend. Either an external executable (the job
// directory is appended as its final argument) or an in-process stub
// script. Both paths go through the same job-directory protocol.
struct BackendSpec {
  std::vector<std::string> command;
  std::optional<nlohmann::json> stub_script;
  std::filesystem::path work_root;
  std::chrono::seconds timeout{600};
  bool keep_jobs = false;
  int64_t seed = 0;
  // Called with response.json's "backend" object after each valid response.
  std::function<void(const nlohmann::json&)> on_identity;

  bool is_stub() const { return stub_script.has_value(); }
  // "stub:<kind>:<mode>" or the command line.
  std::string Identity(BackendKind kind) const;
};

// 600 s unless EVAL3D_BACKEND_TIMEOUT_S holds a positive integer.
std::chrono::seconds DefaultBackendTimeout();

// Creates <root>/job-<uuid>/ with inputs/ and outputs/. Never reuses an
// existing directory.
std::filesystem::path CreateJobDirectory(const std::filesystem::path& root);

// Writes request.json and inputs, runs the backend, then parses and
// validates response.json against the kind's contract. Throws
// kBackendFailed (nonzero exit, status error, missing response),
// kBackendTimeout, or kShapeContract; process failures carry the tail of
// the backend's stderr.
BackendResponse InvokeBackend(const BackendSpec& spec,
                              const BackendRequest& request);

}  // namespace eval3d

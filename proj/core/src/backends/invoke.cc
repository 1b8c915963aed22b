#include "eval3d/backends/invoke.h"

#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <random>
#include <thread>

#include "eval3d/backends/stubs.h"
#include "eval3d/common/error.h"
#include "eval3d/common/png_io.h"

extern char** environ;

namespace eval3d {
namespace {

std::string RandomUuid() {
  static thread_local std::mt19937_64 rng(
      (static_cast<uint64_t>(std::random_device{}()) << 32) ^
      std::random_device{}() ^
      static_cast<uint64_t>(std::hash<std::thread::id>{}(std::this_thread::get_id())));
  const uint64_t hi = rng(), lo = rng();
  char buf[37];
  std::snprintf(buf, sizeof(buf), "%08x-%04x-%04x-%04x-%012llx",
                static_cast<unsigned>(hi >> 32),
                static_cast<unsigned>((hi >> 16) & 0xffff),
                static_cast<unsigned>((hi & 0x0fff) | 0x4000),
                static_cast<unsigned>(((lo >> 48) & 0x3fff) | 0x8000),
                static_cast<unsigned long long>(lo & 0xffffffffffffULL));
  return buf;
}

std::string Tail(const std::filesystem::path& path, size_t max_bytes = 2000) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (text.size() > max_bytes) text = text.substr(text.size() - max_bytes);
  return text;
}

// Returns the exit status, or throws on spawn failure / timeout.
int RunProcess(const std::vector<std::string>& command,
               const std::filesystem::path& job_dir,
               std::chrono::seconds timeout) {
  const std::filesystem::path log = job_dir / "backend.log";
  std::vector<std::string> args = command;
  args.push_back(job_dir.string());
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null",
                                   O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);
  pid_t pid = 0;
  const int rc =
      posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw Error(ErrorCode::kBackendFailed,
                "cannot launch backend '" + command.front() + "'");
  }

  const auto deadline = std::chrono::steady_clock::now() + timeout;
  auto nap = std::chrono::milliseconds(1);
  for (;;) {
    int status = 0;
    const pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) {
      if (WIFEXITED(status)) return WEXITSTATUS(status);
      return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      throw Error(ErrorCode::kBackendTimeout,
                  "backend timed out after " + std::to_string(timeout.count()) +
                      " s; stderr tail:\n" + Tail(log));
    }
    std::this_thread::sleep_for(nap);
    nap = std::min(nap * 2, std::chrono::milliseconds(50));
  }
}

}  // namespace

std::string BackendSpec::Identity(BackendKind kind) const {
  if (stub_script) {
    std::string mode = "default";
    if (stub_script->contains(KindName(kind))) {
      mode = (*stub_script)[std::string(KindName(kind))].value("mode", mode);
    }
    return "stub:" + std::string(KindName(kind)) + ":" + mode;
  }
  std::string s;
  for (const auto& c : command) {
    if (!s.empty()) s += ' ';
    s += c;
  }
  return s;
}

std::chrono::seconds DefaultBackendTimeout() {
  if (const char* env = std::getenv("EVAL3D_BACKEND_TIMEOUT_S")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return std::chrono::seconds(v);
  }
  return std::chrono::seconds(600);
}

std::filesystem::path CreateJobDirectory(const std::filesystem::path& root) {
  std::filesystem::create_directories(root);
  for (int attempt = 0; attempt < 16; ++attempt) {
    const auto dir = root / ("job-" + RandomUuid());
    std::error_code ec;
    if (std::filesystem::create_directory(dir, ec)) {
      std::filesystem::create_directory(dir / "inputs");
      std::filesystem::create_directory(dir / "outputs");
      return dir;
    }
  }
  throw Error(ErrorCode::kIo, "cannot create job directory in " + root.string());
}

BackendResponse InvokeBackend(const BackendSpec& spec,
                              const BackendRequest& request) {
  if (!spec.is_stub() && spec.command.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "backend for '" + std::string(KindName(request.kind)) +
                    "' has no command");
  }
  const auto root = spec.work_root.empty()
                        ? std::filesystem::temp_directory_path() / "eval3d-jobs"
                        : spec.work_root;
  const auto job = CreateJobDirectory(root);

  std::map<std::string, std::string> paths;
  for (const auto& [name, input] : request.inputs) {
    if (const auto* t = std::get_if<Tensor>(&input)) {
      const std::string rel = "inputs/" + name + ".etns";
      WriteTensor(job / rel, *t);
      paths[name] = rel;
    } else {
      const std::string rel = "inputs/" + name + ".png";
      WritePngRgb(job / rel, std::get<RgbImage>(input));
      paths[name] = rel;
    }
  }
  nlohmann::json req = RequestToJson(request, paths);
  req["params"]["seed"] = spec.seed;
  WriteJsonFile(job / "request.json", req);

  const std::string kind(KindName(request.kind));
  if (spec.is_stub()) {
    ServeStubJob(*spec.stub_script, job);
  } else {
    const int code = RunProcess(spec.command, job, spec.timeout);
    if (code != 0) {
      std::string msg = kind + " backend exited with status " +
                        std::to_string(code);
      if (std::filesystem::exists(job / "response.json")) {
        try {
          msg += ": " + ReadJsonFile(job / "response.json").value("message", "");
        } catch (const Error&) {
        }
      }
      throw Error(ErrorCode::kBackendFailed,
                  msg + "; stderr tail:\n" + Tail(job / "backend.log"));
    }
  }

  if (!std::filesystem::exists(job / "response.json")) {
    throw Error(ErrorCode::kBackendFailed,
                kind + " backend wrote no response.json; stderr tail:\n" +
                    Tail(job / "backend.log"));
  }
  BackendResponse response =
      ParseResponse(ReadJsonFile(job / "response.json"), job, request.kind);
  if (response.status == BackendStatus::kError) {
    throw Error(ErrorCode::kBackendFailed,
                kind + " backend reported error: " + response.message);
  }
  ValidateResponse(request, response);
  if (spec.on_identity) spec.on_identity(response.backend);
  if (!spec.keep_jobs) {
    std::error_code ec;
    std::filesystem::remove_all(job, ec);
  }
  return response;
}

}  // namespace eval3d

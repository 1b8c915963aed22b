// Standalone stub backend: eval3d-stub-backend [--script file.json] <job_dir>

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eval3d/backends/stubs.h"

int main(int argc, char** argv) {
  CLI::App app{"Deterministic stub backend for the eval3d job protocol"};
  std::string script_path;
  std::string job_dir;
  app.add_option("--script", script_path, "JSON stub script keyed by kind");
  app.add_option("job_dir", job_dir, "Job directory")->required();
  CLI11_PARSE(app, argc, argv);

  nlohmann::json script = eval3d::DefaultStubScript();
  if (!script_path.empty()) {
    std::ifstream in(script_path);
    if (!in) {
      std::cerr << "cannot open script " << script_path << "\n";
      return 1;
    }
    try {
      script = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "bad script: " << e.what() << "\n";
      return 1;
    }
  }
  return eval3d::ServeStubJob(script, job_dir);
}

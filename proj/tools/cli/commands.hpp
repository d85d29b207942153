#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace airydim::cli {

struct RunResult {
  std::filesystem::path output_dir;
  // Data files written, relative to output_dir, in write order.
  std::vector<std::string> files;
  // Set when the run should exit nonzero after writing what it could.
  int exit_code = 0;
  std::string message;
};

// Runs the command and writes its data files plus manifest.json. Errors
// propagate as exceptions; see exit_code_for.
RunResult run(const SimConfig& config);

// 2 config error, 3 infeasible sizing, 4 fit impossible, 1 anything else.
int exit_code_for(const std::exception& error) noexcept;

// Loads the config echoed in a manifest, so a run can be repeated from it.
RawConfig config_from_manifest(const std::filesystem::path& manifest, Command& command);

}  // namespace airydim::cli

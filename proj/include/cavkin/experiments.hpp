#pragma once

#include <string>
#include <vector>

#include "cavkin/config.hpp"

namespace cavkin {

inline constexpr const char* tool_version = "cavkin 0.1.0";

struct ExperimentResult {
  std::vector<std::string> written_files;
};

// Runs the configured experiment and writes its artifact set (manifest plus
// mode-specific tables) into cfg.out_dir. On any failure the partially
// written files are removed before the exception propagates.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace cavkin

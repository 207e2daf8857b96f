#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "config.hpp"

namespace decaylab::cli {

struct RunOutcome {
  std::filesystem::path directory;
  nlohmann::json summary;
  bool ok = false;
  bool validation_error = false;  // a stage rejected its configuration
  std::string failed_stage;
  std::string error;
};

/// Executes the configured pipeline and writes CSV artifacts, summary.json
/// and manifest.json into config.output_dir. Never throws for stage
/// failures; they are recorded in the manifest and the outcome.
RunOutcome run_scenario(const ScenarioConfig& config, std::ostream& log);

/// Doubles with 17 significant digits.
std::string format_double(double v);

}  // namespace decaylab::cli

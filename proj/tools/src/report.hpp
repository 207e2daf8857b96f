#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace decaylab::cli {

struct Report {
  nlohmann::json data;
  std::string markdown;
  bool all_pass = false;
  std::vector<std::string> missing;  // artifacts referenced but absent
};

/// Aggregates summary.json files of completed runs into acceptance rows.
/// Throws ConfigError for an empty input set; unreadable runs are listed in
/// `missing` and the remaining runs are still reported.
Report build_report(const std::vector<std::filesystem::path>& run_dirs);

/// Writes report.json and report.md into `out_dir`.
void write_report(const Report& report, const std::filesystem::path& out_dir);

}  // namespace decaylab::cli

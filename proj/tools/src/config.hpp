#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "decaylab/initial_data.hpp"
#include "decaylab/types.hpp"

namespace decaylab::cli {

enum class Geometry { radial, cartesian };

struct PhysicalStage {
  double spacing = 1.0 / 128.0;  // radial node spacing
  double extent = 0.0;           // r_max or box half width; 0 picks t_end + 1
  std::size_t points = 0;        // Cartesian nodes per axis
  double t_end = 10.0;
  double cfl = 0.5;
  std::size_t output_every = 64;  // steps between stored snapshots
  std::vector<double> probe_radii{0.0, 1.0};
  std::size_t workers = 0;
};

struct CompactifiedStage {
  bool enabled = false;
  std::size_t points = 1001;
  double t_end = -0.05;
  double cfl = 0.5;
  double handoff_spacing = 1.0 / 256.0;
  double truncation = 0.95;
  double taper_start = 0.9;
  std::size_t output_every = 4;
};

struct DiagnosticsStage {
  std::size_t flux_apexes = 0;
  std::uint64_t seed = 1;
};

struct AnalysisStage {
  double fit_t_min = 2.0;
  double fit_t_max = 10.0;
  double lightcone_v0 = 1.0;
  double lightcone_u_min = 5.0;
  double lightcone_u_max = 20.0;
};

struct DuhamelStage {
  std::size_t bound_points = 0;  // improvement-chain samples (0 disables)
  std::size_t lemma_points = 0;  // decay lemma samples per family (0 disables)
};

struct ChecksStage {
  bool conformal = true;
  bool huygens = true;
};

struct ScenarioConfig {
  std::string name = "scenario";
  Geometry geometry = Geometry::radial;
  double p = 3.0;
  InitialDataSpec data;
  PhysicalStage physical;
  CompactifiedStage compactified;
  DiagnosticsStage diagnostics;
  AnalysisStage analysis;
  DuhamelStage duhamel;
  ChecksStage checks;
  std::filesystem::path output_dir = "runs/scenario";
  /// Hex SHA-256 of the config file bytes.
  std::string hash;
};

/// Parses a sectioned key = value file. Unknown sections or keys and values
/// out of range raise ConfigError naming the key.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(const std::string& text);

/// Throws ConfigError naming the offending key.
void validate(const ScenarioConfig& config);

std::string sha256_hex(const std::string& bytes);

}  // namespace decaylab::cli

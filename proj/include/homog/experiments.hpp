#pragma once

#include <string>
#include <utility>
#include <vector>

#include "homog/config.hpp"
#include "homog/report.hpp"
#include "json.hpp"

namespace homog {

inline constexpr int kSchemaVersion = 1;

struct ExperimentResult {
  std::string experiment;
  bool passed = false;
  /// Main table, deterministic for a fixed config and seed.
  std::string csv;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  /// Experiment-specific summary fields (final errors, counts).
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  /// Extra artifacts as (file name, body); binary sample files are written directly.
  std::vector<std::pair<std::string, std::string>> files;
  std::string reason;
};

/// Runs the experiment named in the config. Writes sample files (if any) into
/// out_dir; everything else is returned for the caller to persist.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// {schema_version, experiment, passed, rows, wall_time, ...}
std::string summary_json(const ExperimentResult& r, double wall_time, std::uint64_t seed);

/// Each of the last `steps` transitions of errors is non-increasing, or lands
/// below `noise_floor` (errors that already sit at quadrature noise).
bool decreasing_tail(const std::vector<double>& errors, int steps, double noise_floor);

}  // namespace homog

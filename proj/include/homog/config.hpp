#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "homog/levy_measure.hpp"
#include "homog/periodic_coeff.hpp"
#include "homog/test_function.hpp"

namespace homog {

/// Scalar, string, boolean or array value of a config key.
using ConfigValue = std::variant<double, std::string, bool, std::vector<double>, std::vector<std::string>>;

/// Parsed TOML-like file: [table] headers, key = value lines, # comments.
/// Values are numbers, "strings", true/false and [arrays] that may span lines.
class ConfigDocument {
 public:
  static ConfigDocument parse(const std::string& text, const std::string& source = "<config>");
  static ConfigDocument load(const std::string& path);

  bool has(const std::string& table, const std::string& key) const;
  const ConfigValue* find(const std::string& table, const std::string& key) const;
  void set(const std::string& table, const std::string& key, ConfigValue v);

  /// Typed getters; a missing key returns the fallback, a key of the wrong
  /// type throws a Validation error naming table.key.
  double number(const std::string& table, const std::string& key, double fallback) const;
  std::string text(const std::string& table, const std::string& key, const std::string& fallback) const;
  bool flag(const std::string& table, const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& table, const std::string& key,
                              const std::vector<double>& fallback) const;

  /// Keys present but never read; lets the runner reject typos.
  std::vector<std::string> unused() const;

 private:
  std::map<std::string, std::map<std::string, ConfigValue>> tables_;
  mutable std::map<std::string, bool> read_;
};

/// Validated experiment settings. Builders turn the config tables into
/// library objects and throw Validation errors naming the offending field.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  ConfigDocument doc;

  static const std::vector<std::string>& experiment_names();

  /// experiment comes from the subcommand; a conflicting [experiment] name is rejected.
  static ExperimentConfig from_document(ConfigDocument doc, const std::string& experiment);

  PeriodicCoefficient coefficient(const std::string& default_kind, double default_gamma = 0.3) const;
  LevyDensity density(double default_beta) const;
  TestFunction test_function() const;

  /// Grid from [grids]; `decreasing` enforces strict decrease.
  std::vector<double> grid(const std::string& key, const std::vector<double>& fallback, bool decreasing) const;
  double tolerance(double fallback) const;
};

/// 2^{-1}, ..., 2^{-n}
std::vector<double> dyadic_grid(int n, int first = 1);

}  // namespace homog

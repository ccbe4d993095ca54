#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "homog/experiments.hpp"
#include "homog/parallel.hpp"

namespace {

bool is_validation(homog::ErrorKind k) {
  using homog::ErrorKind;
  return k == ErrorKind::Validation || k == ErrorKind::ExponentOutOfRange || k == ErrorKind::UnsupportedDimension ||
         k == ErrorKind::UnsupportedDensity || k == ErrorKind::Domain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic homogenization experiments for modulated Levy forms"};
  std::string config_path;
  std::string out_dir;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "TOML-like experiment config")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (default: experiment.out or ./out)");
  app.add_option("--threads", threads, "worker cap, 0 = all cores")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "RNG seed, overrides the config");
  app.require_subcommand(1);
  for (const auto& name : homog::ExperimentConfig::experiment_names()) {
    app.add_subcommand(name, "run the " + name + " experiment")->fallthrough();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string experiment = app.get_subcommands().front()->get_name();

  const auto start = std::chrono::steady_clock::now();
  homog::ExperimentConfig cfg;
  try {
    auto doc = config_path.empty() ? homog::ConfigDocument{} : homog::ConfigDocument::load(config_path);
    cfg = homog::ExperimentConfig::from_document(std::move(doc), experiment);
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    const double t = cfg.doc.number("experiment", "threads", 1.0);
    homog::set_thread_count(threads ? *threads : static_cast<int>(t));
  } catch (const homog::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  homog::ExperimentResult res;
  int status = 0;
  try {
    res = homog::run_experiment(cfg);
    status = res.passed ? 0 : 1;
  } catch (const homog::Error& e) {
    if (is_validation(e.kind())) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
    res.experiment = experiment;
    res.passed = false;
    res.reason = e.what();
    status = 1;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  try {
    std::filesystem::create_directories(cfg.out_dir);
    const std::string base = cfg.out_dir + "/" + experiment;
    if (!res.csv.empty()) homog::write_text_file(base + ".csv", res.csv);
    for (const auto& [name, body] : res.files) homog::write_text_file(cfg.out_dir + "/" + name, body);
    homog::write_text_file(base + ".json", homog::summary_json(res, wall, cfg.seed));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (res.summary.contains("unused_keys")) {
    std::cerr << "warning: unused config keys " << res.summary["unused_keys"].dump() << "\n";
  }
  std::printf("%s: %s (%.2f s)%s%s\n", experiment.c_str(), res.passed ? "passed" : "FAILED", wall,
              res.reason.empty() ? "" : " - ", res.reason.c_str());
  return status;
}

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "homog/exponent.hpp"
#include "homog/experiments.hpp"
#include "homog/form_eval.hpp"
#include "homog/parallel.hpp"

namespace fs = std::filesystem;
using namespace homog;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ExperimentResult run(const std::string& experiment, const std::string& toml, const std::string& out = "") {
  auto cfg = ExperimentConfig::from_document(ConfigDocument::parse(toml), experiment);
  cfg.out_dir = out.empty() ? (fs::temp_directory_path() / "homog_acceptance" / experiment).string() : out;
  return run_experiment(cfg);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const char* kDyadic10 =
    "[grids]\ndelta = [0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625, 0.001953125, "
    "0.0009765625]\n";
const char* kDyadic8 = "[grids]\ndelta = [0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625]\n";

Outcome c1_example1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run("example1",
                     "[grids]\nbeta = [0.5, 1.0, 1.4]\ngamma = [0.2, 0.55, 0.8]\ndelta = [1.0, 0.5]\n"
                     "delta_iii = [1.0, 0.5, 0.3333333333333333, 0.05]\n");
  const double wall = seconds_since(t0);
  const int mism = r.summary.value("mismatches", -1);
  return {r.passed && mism == 0 && wall <= 60.0,
          std::to_string(r.rows.size()) + " verdicts, " + std::to_string(mism) + " mismatches"};
}

Outcome c2_vague() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (const std::string coeff : {"kind = \"smooth_cosine\"", "kind = \"example1\"\ngamma = 0.3"}) {
    const auto r = run("vague", "[experiment]\ntolerance = 1e-2\ndecreasing_steps = 4\n[coefficient]\n" + coeff +
                                    "\n[test_function]\nkind = \"tent\"\n" + kDyadic10);
    ok = ok && r.passed && r.rows.size() == 10 && r.summary.value("decreasing_tail", false);
    detail += fmt("err %.2e ", r.summary.value("final_error", 1.0));
  }
  const double wall = seconds_since(t0);
  return {ok && wall <= 30.0, detail + "(limit 30 s)"};
}

Outcome c3_lp_bound() {
  const auto rep = lp_bound_check(PeriodicCoefficient::example1(0.4), 2.0, 3, {0.7, 0.3, 0.11, 0.05});
  return {rep.passed && rep.violations == 0 && rep.rows.size() == 4,
          std::to_string(rep.violations) + " violations over " + std::to_string(rep.rows.size()) + " deltas"};
}

Outcome c4_m2() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (const std::string coeff : {"kind = \"smooth_cosine\"", "kind = \"example1\"\ngamma = 0.3"}) {
    const auto r = run("m2", "[experiment]\ntolerance = 2e-2\n[coefficient]\n" + coeff +
                                 "\n[density]\nkind = \"stable\"\nbeta = 1.0\n[test_function]\nkind = \"tent\"\n" +
                                 kDyadic8);
    ok = ok && r.passed;
    detail += fmt("rel %.2e ", r.summary.value("final_error", 1.0));
  }
  const double wall = seconds_since(t0);
  return {ok && wall <= 300.0, detail + "(limit 300 s)"};
}

Outcome c5_spectral() {
  const auto r = run("spectral-identity", "[experiment]\nrel_tol = 1e-4\ntolerance = 1e-3\n");
  double worst = 0.0;
  for (const auto& row : r.rows) worst = std::max(worst, row.value("rel_diff", 1.0));
  return {r.passed && r.rows.size() >= 6,
          std::to_string(r.rows.size()) + " pairs, worst rel " + fmt("%.2e", worst)};
}

Outcome c6_exponent() {
  const ExponentSpec e(ModulatedMeasure(PeriodicCoefficient::constant(1.0), LevyDensity::stable_like(1.0), 1.0));
  const double err = std::abs(psi(e, 1.0).value - std::numbers::pi);
  double worst = 0.0;
  for (double beta : {0.5, 1.0, 1.5}) {
    for (double c : {2.0, 10.0}) {
      worst = std::max(worst, homogeneity_error(LevyDensity::stable_like(beta), 1.0, c));
    }
  }
  return {err <= 1e-4 && worst <= 1e-6, fmt("|psi(1) - pi| %.2e, ", err) + fmt("homogeneity %.2e", worst)};
}

Outcome c7_simulation() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string common =
      "[density]\nkind = \"stable\"\nbeta = 1.0\n[simulation]\nn_samples = 100000\nmode = \"drop\"\n"
      "write_samples = false\n";
  const auto a = run("simulate-cf", "[experiment]\nseed = 7\n[coefficient]\nkind = \"constant\"\nvalue = 1.0\n" +
                                        common + "[grids]\ndelta = [1.0]\nt = [0.1, 0.25, 0.5]\nxi = [0.5, 1, 2, 4]\n");
  const auto b = run("simulate-cf", "[experiment]\nseed = 20240601\n[coefficient]\nkind = \"smooth_cosine\"\n" +
                                        common +
                                        "[grids]\ndelta = [0.015625]\nt = [0.1, 0.25, 0.5]\nxi = [0.5, 1, 2, 4]\n");
  const double wall = seconds_since(t0);
  const double fa = a.summary.value("inside_fraction", 0.0);
  const double fb = b.summary.value("inside_fraction", 0.0);
  const bool ok = a.rows.size() >= 12 && b.rows.size() >= 12 && fa >= 0.95 && fb >= 0.95 && wall <= 120.0;
  return {ok, fmt("inside constant %.3f, ", fa) + fmt("cosine %.3f ", fb) + "(limit 120 s)"};
}

Outcome c8_rescaling() {
  const auto id = run("rescale-identity",
                      "[experiment]\ntolerance = 1e-6\n[coefficient]\nkind = \"smooth_cosine\"\n[density]\nbeta = 1.0\n"
                      "[test_function]\nkind = \"tent\"\ncenter = 0.0\nhalfwidth = 1.0\n"
                      "[grids]\neps = [0.3, 0.25, 0.0625]\n");
  double worst = 0.0;
  for (const auto& row : id.rows) worst = std::max(worst, row.value("rel_err", 1.0));
  const auto fdd = run("fdd", "[experiment]\nseed = 11\n[coefficient]\nkind = \"smooth_cosine\"\n"
                              "[simulation]\nn_samples = 100000\n"
                              "[grids]\neps = [0.25, 0.0625, 0.015625]\nt = [0.5, 1.0]\nxi = [0.5, 1.0, 2.0]\n");
  return {id.passed && fdd.passed, fmt("identity rel %.2e, ", worst) + "fdd " + (fdd.passed ? "inside" : "outside") +
                                       " at smallest eps"};
}

Outcome c9_m1() {
  bool ok = true;
  int families = 0;
  for (const std::string coeff : {"kind = \"smooth_cosine\"", "kind = \"example1\"\ngamma = 0.3"}) {
    const auto r = run("m1-catalog", "[coefficient]\n" + coeff + "\n[density]\nbeta = 1.0\n" + kDyadic8);
    ok = ok && r.passed && r.summary.value("violations", -1) == 0;
    families = static_cast<int>(r.rows.size());
  }
  return {ok, std::to_string(families) + " families per coefficient, " + (ok ? "no violations" : "violations found")};
}

// Runs every experiment twice through the CLI (1 and 2 worker threads) and
// compares all CSV and sample files byte for byte.
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome c10_reproducibility() {
  const fs::path root = fs::temp_directory_path() / "homog_acceptance" / "repro";
  fs::remove_all(root);
  fs::create_directories(root);
  // Smaller sample counts keep the rerun cheap; the code path is the same.
  const std::map<std::string, std::string> overrides = {
      {"simulate-cf",
       "[experiment]\nseed = 5\n[coefficient]\nkind = \"smooth_cosine\"\n[simulation]\nn_samples = 20000\n"
       "[grids]\ndelta = [0.015625]\nt = [0.1, 0.5]\nxi = [0.5, 2.0]\n"},
      {"fdd", "[experiment]\nseed = 6\n[simulation]\nn_samples = 20000\n[grids]\neps = [0.25, 0.0625]\n"},
  };
  int compared = 0, differing = 0, failed_runs = 0;
  for (const auto& name : ExperimentConfig::experiment_names()) {
    fs::path config = fs::path(HOMOG_CONFIG_DIR) / (name + ".toml");
    if (auto it = overrides.find(name); it != overrides.end()) {
      config = root / (name + ".toml");
      std::ofstream(config) << it->second;
    }
    for (const char* pass : {"a", "b"}) {
      const std::string cmd = std::string(HOMOG_CLI) + " --config " + config.string() + " --out " +
                              (root / pass / name).string() + " --threads " + (pass[0] == 'a' ? "1" : "2") + " " +
                              name + " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) ++failed_runs;
    }
    for (const auto& entry : fs::directory_iterator(root / "a" / name)) {
      const auto ext = entry.path().extension();
      if (ext != ".csv" && ext != ".bin") continue;
      ++compared;
      const fs::path other = root / "b" / name / entry.path().filename();
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
    }
  }
  return {failed_runs == 0 && differing == 0 && compared >= 11,
          std::to_string(compared) + " files compared, " + std::to_string(differing) + " differ, " +
              std::to_string(failed_runs) + " failed runs"};
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  set_thread_count(0);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 example1 classification", c1_example1},
      {"2 vague convergence", c2_vague},
      {"3 Lp bound", c3_lp_bound},
      {"4 M2 limsup", c4_m2},
      {"5 spectral identity", c5_spectral},
      {"6 exponent oracle", c6_exponent},
      {"7 simulation CF", c7_simulation},
      {"8 rescaling", c8_rescaling},
      {"9 M1 catalog", c9_m1},
      {"10 reproducibility", c10_reproducibility},
  };
  int failures = 0;
  for (const auto& [label, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) ++failures;
    std::printf("[%s] %-28s %s (%.2f s)\n", o.passed ? "PASS" : "FAIL", label.c_str(), o.detail.c_str(),
                seconds_since(t0));
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

#include "homog/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "homog/errors.hpp"
#include "homog/parallel.hpp"

namespace homog {

namespace {
int g_threads = 1;
}

int thread_count() { return g_threads > 0 ? g_threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }
void set_thread_count(int n) { g_threads = n; }

bool strictly_decreasing(const std::vector<double>& xs) {
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] < xs[i - 1])) return false;
  }
  return true;
}

double final_rel_error(const std::vector<ConvergenceRow>& rows) {
  if (rows.empty()) return 0.0;
  const double last = rows.back().delta;
  double worst = 0.0;
  for (const auto& r : rows) {
    if (r.delta == last) worst = std::max(worst, r.rel_err);
  }
  return worst;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string convergence_csv(const ConvergenceReport& r, bool with_method) {
  std::string out = "delta,xi,psi,psi_limit,abs_err,rel_err";
  if (with_method) out += ",method";
  out += '\n';
  for (const auto& row : r.rows) {
    out += format_double(row.delta) + ',' + format_double(row.xi) + ',' + format_double(row.value) + ',' +
           format_double(row.limit) + ',' + format_double(row.abs_err) + ',' + format_double(row.rel_err);
    if (with_method) out += ',' + row.method;
    out += '\n';
  }
  return out;
}

std::string convergence_summary_json(const ConvergenceReport& r) {
  nlohmann::ordered_json j;
  j["check"] = r.check;
  j["passed"] = r.passed;
  j["final_error"] = std::isfinite(r.final_error) ? nlohmann::ordered_json(r.final_error) : nlohmann::ordered_json();
  return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Validation, "cannot open output file " + path);
  f << body;
  if (!f) throw Error(ErrorKind::Validation, "failed writing " + path);
}

}  // namespace homog

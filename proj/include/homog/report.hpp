#pragma once

#include <string>
#include <vector>

namespace homog {

/// One row of a convergence table. For exponent scans `value` is psi_delta(xi)
/// and `limit` the homogenized exponent; form checks reuse the layout.
struct ConvergenceRow {
  double delta = 0.0;
  double xi = 0.0;
  double value = 0.0;
  double limit = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double error_estimate = 0.0;
  std::string method;
};

struct ConvergenceReport {
  std::string check;
  std::vector<ConvergenceRow> rows;
  double tolerance = 0.0;
  bool passed = false;
  bool monotone_deltas = true;
  /// Error measure compared against the tolerance (largest rel_err on the final delta
  /// unless a check sets it otherwise).
  double final_error = 0.0;
};

/// True when xs is strictly decreasing.
bool strictly_decreasing(const std::vector<double>& xs);

/// Largest rel_err among rows at the last delta of the table.
double final_rel_error(const std::vector<ConvergenceRow>& rows);

/// delta,xi,psi,psi_limit,abs_err,rel_err[,method]
std::string convergence_csv(const ConvergenceReport& r, bool with_method);
/// {"check": ..., "passed": ..., "final_error": ...}
std::string convergence_summary_json(const ConvergenceReport& r);

/// %.17g, or "nan"/"inf" spelled out for non-finite values.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& body);

}  // namespace homog

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "homog/exponent.hpp"
#include "homog/report.hpp"
#include "homog/test_function.hpp"

namespace homog {

enum class FormMethod { Direct, Spectral };

const char* to_string(FormMethod m);

struct FormValue {
  double value = 0.0;
  double error = 0.0;
  FormMethod method = FormMethod::Direct;
  bool converged = true;
};

/// E(u, v) = double integral of (u(x) - u(y)) (v(x) - v(y)) a_delta(y - x) nu(y - x),
/// computed in the difference variable z = y - x with the x-integral done exactly
/// on the kink pattern of u and v.
FormValue form_direct(const TestFunction& u, const TestFunction& v, const ModulatedMeasure& m,
                      const QuadratureConfig& cfg = {});
FormValue form_direct(const TestFunction& u, const ModulatedMeasure& m, const QuadratureConfig& cfg = {});

/// Integral of (u(x) - u(x + z)) (v(x) - v(x + z)) dx.
double difference_correlation(const TestFunction& u, const TestFunction& v, double z);

/// Normalization found by matching both methods on (tent, a = 1, beta = 1).
struct SpectralCalibration {
  double constant = 0.0;
  std::string label;
  double direct = 0.0;
  double naive = 0.0;
};

/// Computed once; throws NormalizationMismatch when the ratio matches no
/// candidate in {1, 2 pi, 2, 4 pi}.
const SpectralCalibration& spectral_calibration();

/// Integral of |hat u|^2 psi_delta with hat u = (2 pi)^{-1} F u, before calibration.
FormValue spectral_naive(const TestFunction& u, const ExponentSpec& e, double rel_tol = 1e-6);

/// Calibrated spectral value of E(u, u).
FormValue form_spectral(const TestFunction& u, const ExponentSpec& e, double rel_tol = 1e-6);

/// |integral g a_delta - abar integral g| per delta.
ConvergenceReport vague_convergence_check(const TestFunction& g, const PeriodicCoefficient& a,
                                          const std::vector<double>& deltas, double tolerance,
                                          const QuadratureConfig& cfg = {});

/// Integrand in L^q(K) given with its own breakpoints (jumps, kinks).
struct KernelFunction {
  std::function<double(double)> f;
  std::vector<double> breakpoints;
  std::string label;
};

/// |integral_K g a_delta - abar integral_K g| per delta, K = [k_lo, k_hi].
/// Requires 1 < p < p_max(a).
ConvergenceReport weak_lp_check(const KernelFunction& g, double k_lo, double k_hi, const PeriodicCoefficient& a,
                                double p, const std::vector<double>& deltas, double tolerance,
                                const QuadratureConfig& cfg = {});

struct LpBoundRow {
  double delta = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

struct LpBoundReport {
  std::vector<LpBoundRow> rows;
  int violations = 0;
  bool passed = false;
};

/// integral_{-N}^{N} a_delta^p <= 2 (N + 1) integral_0^1 a^p for each delta in (0, 1).
LpBoundReport lp_bound_check(const PeriodicCoefficient& a, double p, int n, const std::vector<double>& deltas,
                             const QuadratureConfig& cfg = {});

/// g_n(x, y) a_delta_n(x - y) integrated over the band K = {r_lo <= |x - y| <= r_hi, |x| <= x_max}
/// against abar times the integral of g.
struct BandFunction {
  std::function<double(double, double)> g;
  std::string label;
};

ConvergenceReport corollary2_check(const std::vector<BandFunction>& g_sequence, const BandFunction& g_limit,
                                   double x_max, double r_lo, double r_hi, const PeriodicCoefficient& a,
                                   const std::vector<double>& deltas, double tolerance,
                                   const QuadratureConfig& cfg = {});

/// E^{delta_n}(u, u) against abar E^{a = 1}(u, u).
ConvergenceReport mosco_m2_check(const TestFunction& u, const PeriodicCoefficient& a, const LevyDensity& nu,
                                 const std::vector<double>& deltas, double tolerance,
                                 const QuadratureConfig& cfg = {});

struct M1Entry {
  std::string family;
  std::vector<double> energies;  ///< E^{delta_n}(u_n, u_n)
  double target = 0.0;           ///< E(u, u) of the weak limit
  double tail_min = 0.0;         ///< min over the last half of the sequence
  bool holds = false;
};

struct M1Report {
  std::vector<M1Entry> entries;
  int violations = 0;
  bool passed = false;
};

/// One catalog family: u_n for n = 1..count and the weak limit u.
struct M1Family {
  std::string name;
  std::function<TestFunction(int)> u_n;
  TestFunction limit;
};

/// Standard catalog around u: u_n = u, u_n = u + n^{-1/2} tent(0, 1/n), u_n = tent(n, 1) -> 0.
std::vector<M1Family> m1_catalog(const TestFunction& u);

/// liminf E^{delta_n}(u_n, u_n) >= abar E(u, u) - tol, estimated by the minimum over the
/// second half of n = 1..deltas.size().
M1Report m1_necessary_check(const std::vector<M1Family>& families, const PeriodicCoefficient& a,
                            const LevyDensity& nu, const std::vector<double>& deltas, double tolerance,
                            const QuadratureConfig& cfg = {});

}  // namespace homog

#pragma once

#include <vector>

#include <Eigen/Core>

#include "homog/levy_measure.hpp"
#include "homog/report.hpp"

namespace homog {

/// A modulated measure that passed the Levy integrability check, ready for
/// exponent evaluation. Construction throws NotLevyMeasure otherwise.
struct ExponentSpec {
  ModulatedMeasure measure;
  QuadratureConfig cfg;
  IntegrabilityReport integrability;

  explicit ExponentSpec(ModulatedMeasure m, QuadratureConfig c = {});
};

struct ExponentValue {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

/// psi_delta(xi) = integral of (1 - cos(xi h)) a(h/delta) nu(h) over the line.
ExponentValue psi(const ExponentSpec& e, double xi);
ExponentValue psi(const ExponentSpec& e, const Eigen::Ref<const Eigen::VectorXd>& xi);

/// Same integral restricted to |h| > r (the exponent of the jumps kept by a
/// compound Poisson sampler with cutoff r).
ExponentValue psi_truncated(const ExponentSpec& e, double xi, double r);

/// abar * psi(xi) for the coefficient a = 1.
ExponentValue psi_homogenized(double abar, const LevyDensity& nu, double xi, const QuadratureConfig& cfg = {});

/// psi_delta(xi) against abar psi_1(xi) for every (delta, xi); rows ordered by
/// delta then xi. Throws NotLevyMeasure naming the first failing delta.
ConvergenceReport exponent_convergence_scan(const PeriodicCoefficient& a, const LevyDensity& nu,
                                            const std::vector<double>& xi_grid,
                                            const std::vector<double>& deltas, double tolerance,
                                            const QuadratureConfig& cfg = {});

/// Smallest eigenvalue of [psi(x_i) + psi(x_j) - psi(x_i - x_j)] over {0, xi1, xi2}.
double negative_definite_min_eigenvalue(const ExponentSpec& e, double xi1, double xi2);

/// |psi(c xi) - c^beta psi(xi)| / psi(c xi) with a = 1.
double homogeneity_error(const LevyDensity& nu, double xi, double c, const QuadratureConfig& cfg = {});

}  // namespace homog

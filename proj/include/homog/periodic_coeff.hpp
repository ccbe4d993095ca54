#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "homog/quadrature.hpp"

namespace homog {

enum class CoefficientKind { Constant, SmoothCosine, Example1, TensorProduct };

const char* to_string(CoefficientKind kind);

/// Maps x into [0, 1) with floor-based reduction. This is the only place
/// periodicity is enforced.
inline double wrap_unit(double x) {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

/// A Q-periodic coefficient a: R^d -> [0, inf).
///
/// Kinds are Constant(c), SmoothCosine (offset + amplitude cos 2 pi x),
/// the piecewise power profile Example1(gamma) that is unbounded at
/// the integers, and tensor products of 1-d coefficients. A 1-d
/// coefficient may carry a shift, evaluating x -> a(x - shift).
///
/// Evaluation at a singular point returns std::nullopt (unbounded).
class PeriodicCoefficient {
 public:
  static PeriodicCoefficient constant(double c, int dim = 1);
  static PeriodicCoefficient smooth_cosine(double amplitude, double offset);
  static PeriodicCoefficient example1(double gamma);
  static PeriodicCoefficient tensor_product(std::vector<PeriodicCoefficient> factors);

  CoefficientKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double shift() const { return shift_; }
  double constant_value() const { return c_; }
  double amplitude() const { return amplitude_; }
  double offset() const { return offset_; }
  double gamma() const { return gamma_; }
  const std::vector<PeriodicCoefficient>& factors() const { return factors_; }

  std::optional<double> operator()(double x) const;
  std::optional<double> operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Value for use inside integrands: the unbounded sentinel becomes 0,
  /// since singular sets are null sets and quadrature never samples them.
  double density(double x) const { return (*this)(x).value_or(0.0); }

  /// density(anchor + offset), resolved exactly near the lattice of
  /// quarter points so that offsets far below the spacing of doubles at
  /// anchor still see the local power profile.
  double density_local(double anchor, double offset) const;

  bool bounded() const;
  /// Supremum for bounded kinds, +inf otherwise.
  double sup() const;
  /// Largest p with a in L^p_loc guaranteed; +inf for bounded kinds.
  double p_max() const;
  /// True when a(-x) = a(x), i.e. a_delta(h) nu(h) stays symmetric.
  bool even() const;

  /// Points of [0, 1) where a (1-d) is unbounded.
  std::vector<double> singular_points_in_q() const;
  /// Points of [0, 1) where a (1-d) has a kink, a jump or a period start.
  std::vector<double> breakpoints_in_q() const;

  /// All singular points of h -> a(h / delta) inside [lo, hi].
  std::vector<double> singular_points_scaled(double delta, double lo, double hi) const;
  /// All breakpoints of h -> a(h / delta) inside [lo, hi].
  std::vector<double> breakpoints_scaled(double delta, double lo, double hi) const;

  /// Short human-readable form, e.g. "example1(gamma=0.3)".
  std::string describe() const;

 private:
  friend PeriodicCoefficient shifted_coefficient(const PeriodicCoefficient& a, double shift);

  PeriodicCoefficient() = default;
  double eval_unit(double t) const;

  CoefficientKind kind_ = CoefficientKind::Constant;
  int dim_ = 1;
  double c_ = 1.0;
  double amplitude_ = 0.0;
  double offset_ = 0.0;
  double gamma_ = 0.0;
  double shift_ = 0.0;
  std::vector<PeriodicCoefficient> factors_;
};

/// x -> a(x - shift); 1-d only.
PeriodicCoefficient shifted_coefficient(const PeriodicCoefficient& a, double shift);

/// Mean value over the unit cube.
double mean_value(const PeriodicCoefficient& a, const QuadratureConfig& cfg = {});

/// Integral of a(x)^p over one period (1-d). Divergent when p >= p_max.
QuadratureOutcome power_integral(const PeriodicCoefficient& a, double p, const QuadratureConfig& cfg = {});

/// Cosine series a(x) = c_0 + sum_{k>=1} c_k cos(2 pi k x) of an even 1-d
/// coefficient, coefficients c_0..c_{count-1}.
std::vector<double> cosine_coefficients(const PeriodicCoefficient& a, int count,
                                        const QuadratureConfig& cfg = {});

}  // namespace homog

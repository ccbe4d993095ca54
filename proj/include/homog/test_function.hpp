#pragma once

#include <complex>
#include <string>
#include <vector>

namespace homog {

enum class TestFunctionKind { Tent, PiecewiseLinear, SmoothBump, Combination };

const char* to_string(TestFunctionKind kind);

/// Compactly supported Lipschitz function on the line.
///
/// Internally a piecewise linear part (knots with values, zero at both
/// ends) plus a finite combination of smooth bumps
/// exp(1 - 1/(1 - r^2)), r = (x - center) / radius. Sums, scalings,
/// translations and dilations stay in this class.
class TestFunction {
 public:
  static TestFunction tent(double center, double halfwidth);
  /// Knots strictly increasing; first and last value must be 0.
  static TestFunction piecewise_linear(std::vector<double> knots, std::vector<double> values);
  static TestFunction smooth_bump(double center, double radius);
  static TestFunction zero();

  TestFunctionKind kind() const { return kind_; }

  double operator()(double x) const;
  /// Derivative where it exists (one-sided from the right at kinks).
  double derivative(double x) const;

  /// [lo, hi] containing the support; lo == hi for the zero function.
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  bool is_zero() const { return knots_.empty() && bumps_.empty(); }

  double lipschitz_constant() const;
  /// Kinks of the piecewise linear part (where the derivative jumps).
  const std::vector<double>& kinks() const { return knots_; }
  bool piecewise_linear_only() const { return bumps_.empty(); }

  /// F u(xi) = integral of e^{-i xi x} u(x) dx.
  std::complex<double> fourier(double xi) const;
  /// C with |F u(xi)| <= C / xi^2 for all xi != 0.
  double fourier_decay_constant() const;
  /// True when |F u| decays faster than any power (no piecewise linear part).
  bool smooth() const { return knots_.empty(); }

  /// Integral of u v over the line.
  static double inner_product(const TestFunction& u, const TestFunction& v);

  /// x -> u(x - t)
  TestFunction translated(double t) const;
  /// x -> c u(x)
  TestFunction scaled(double c) const;
  /// x -> u(s x), s > 0
  TestFunction dilated(double s) const;
  /// x -> min(max(u(x), 0), 1); piecewise linear functions only.
  TestFunction unit_contraction() const;

  friend TestFunction operator+(const TestFunction& u, const TestFunction& v);
  friend TestFunction operator-(const TestFunction& u, const TestFunction& v);

  std::string describe() const;

 private:
  struct Bump {
    double coef;
    double center;
    double radius;
  };

  TestFunction() = default;
  void refresh();
  double linear_part(double x) const;
  double linear_slope(double x) const;

  TestFunctionKind kind_ = TestFunctionKind::Combination;
  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<Bump> bumps_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::string label_;
};

}  // namespace homog

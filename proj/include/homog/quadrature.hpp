#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "homog/errors.hpp"

namespace homog {

struct QuadratureConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  /// Maximum number of graded shells toward one singular point.
  int max_refinements = 30;
  double divergence_cap = 1e12;
  /// Geometric ratio of successive shells near a singular point.
  double grading_ratio = 0.25;
  /// Budget of the adaptive Gauss-Kronrod bisection on one smooth piece.
  int max_subintervals = 4000;

  void validate() const;
};

struct Converged {
  double value;
  double error;
};

struct Divergent {
  /// Growth exponent p - 1 of an x^{-p} singularity (0 for logarithmic).
  double growth_exponent;
  double partial;
};

struct Inconclusive {
  double partial;
  double error;
  std::string reason;
};

struct QuadratureOutcome {
  std::variant<Converged, Divergent, Inconclusive> verdict{Converged{0.0, 0.0}};
  std::size_t evaluations = 0;

  bool converged() const { return std::holds_alternative<Converged>(verdict); }
  bool divergent() const { return std::holds_alternative<Divergent>(verdict); }
  bool inconclusive() const { return std::holds_alternative<Inconclusive>(verdict); }

  /// Value of a converged outcome; throws QuadratureFailure otherwise.
  double value() const;
  double error() const;
  std::string describe() const;
};

/// Sum of two outcomes over disjoint domains. Divergent dominates
/// Inconclusive, which dominates Converged.
QuadratureOutcome combine(const QuadratureOutcome& lhs, const QuadratureOutcome& rhs);
QuadratureOutcome scale(const QuadratureOutcome& outcome, double factor);

template <typename Scalar>
struct GaussKronrodResult {
  Scalar value{};
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

}  // namespace detail

/// One 15-point Kronrod panel with the embedded 7-point Gauss rule; the
/// error estimate follows the QUADPACK heuristic.
template <typename Scalar, typename F>
GaussKronrodResult<Scalar> gauss_kronrod_15(F&& f, double a, double b) {
  using detail::kGaussWeights;
  using detail::kKronrodNodes;
  using detail::kKronrodWeights;
  using detail::magnitude;
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const Scalar fc = f(center);
  Scalar kronrod = fc * kKronrodWeights[7];
  Scalar gauss = fc * kGaussWeights[3];
  std::array<Scalar, 7> f1{};
  std::array<Scalar, 7> f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    kronrod += (f1[j] + f2[j]) * kKronrodWeights[j];
    if (j % 2 == 1) gauss += (f1[j] + f2[j]) * kGaussWeights[j / 2];
  }
  const Scalar mean = kronrod * 0.5;
  double asc = kKronrodWeights[7] * magnitude(fc - mean);
  for (int j = 0; j < 7; ++j) {
    asc += kKronrodWeights[j] * (magnitude(f1[j] - mean) + magnitude(f2[j] - mean));
  }
  asc *= std::abs(half);
  double err = magnitude((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) {
    err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  }
  constexpr double kRoundoff = 50.0 * 2.220446049250313e-16;
  double abs_sum = magnitude(fc) * kKronrodWeights[7];
  for (int j = 0; j < 7; ++j) abs_sum += kKronrodWeights[j] * (magnitude(f1[j]) + magnitude(f2[j]));
  abs_sum *= std::abs(half);
  if (abs_sum > std::numeric_limits<double>::min() / kRoundoff) {
    err = std::max(kRoundoff * abs_sum, err);
  }
  return {kronrod * half, err, 15, true};
}

/// Globally adaptive bisection driven by the largest local error. The
/// final sum is taken over panels sorted by position so the result does
/// not depend on heap order.
template <typename Scalar, typename F>
GaussKronrodResult<Scalar> adaptive_gauss_kronrod(F&& f, double a, double b, double abs_tol,
                                                  double rel_tol, int max_subintervals) {
  struct Panel {
    double lo, hi;
    GaussKronrodResult<Scalar> r;
  };
  auto by_error = [](const Panel& x, const Panel& y) { return x.r.error < y.r.error; };
  std::vector<Panel> heap;
  heap.push_back({a, b, gauss_kronrod_15<Scalar>(f, a, b)});
  std::size_t evals = 15;
  Scalar total = heap.front().r.value;
  double total_err = heap.front().r.error;
  int panels = 1;
  auto target = [&] { return std::max(abs_tol, rel_tol * detail::magnitude(total)); };
  while (total_err > target() && panels < max_subintervals) {
    std::pop_heap(heap.begin(), heap.end(), by_error);
    Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > std::min(worst.lo, worst.hi) && mid < std::max(worst.lo, worst.hi))) {
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_error);
      break;
    }
    Panel left{worst.lo, mid, gauss_kronrod_15<Scalar>(f, worst.lo, mid)};
    Panel right{mid, worst.hi, gauss_kronrod_15<Scalar>(f, mid, worst.hi)};
    evals += 30;
    total += left.r.value + right.r.value - worst.r.value;
    total_err += left.r.error + right.r.error - worst.r.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
    ++panels;
  }
  std::sort(heap.begin(), heap.end(), [](const Panel& x, const Panel& y) { return x.lo < y.lo; });
  GaussKronrodResult<Scalar> out;
  for (const auto& p : heap) {
    out.value += p.r.value;
    out.error += p.r.error;
  }
  out.evaluations = evals;
  out.converged = out.error <= std::max(abs_tol, rel_tol * detail::magnitude(out.value));
  return out;
}

using Integrand = std::function<double(double)>;

/// Adaptive quadrature on [lo, hi] for integrands with integrable (or
/// not) power-type singularities at `singular_points`. Breakpoints mark
/// kinks or jumps where the integrand is finite. Pieces adjacent to a
/// singular point are integrated over geometrically graded shells; the
/// shell increments decide between convergence (geometric tail
/// extrapolation) and divergence (increments that stop decaying).
QuadratureOutcome integrate_singular(const Integrand& f, double lo, double hi,
                                     std::span<const double> singular_points,
                                     const QuadratureConfig& cfg,
                                     std::span<const double> breakpoints = {});

/// Integrand evaluated as f(anchor, offset) at x = anchor + offset, where
/// anchor is a piece endpoint and offset is exact. Lets callers resolve
/// singular points far from the origin without cancellation.
using LocalIntegrand = std::function<double(double, double)>;

QuadratureOutcome integrate_singular_local(const LocalIntegrand& f, double lo, double hi,
                                           std::span<const double> singular_points,
                                           const QuadratureConfig& cfg,
                                           std::span<const double> breakpoints = {});

/// Plain adaptive integration of a bounded integrand with optional breakpoints.
QuadratureOutcome integrate_smooth(const Integrand& f, double lo, double hi,
                                   const QuadratureConfig& cfg,
                                   std::span<const double> breakpoints = {});

struct SeriesValue {
  double value;
  double error;
};

/// Sum_{l >= 0} (q + l)^{-s} for s > 1, q > 0: partial sum followed by an
/// Euler-Maclaurin remainder.
SeriesValue hurwitz_zeta(double s, double q);

/// period_integral * Sum_{l >= start} l^{-1-beta}; the error field carries
/// the remainder bound.
SeriesValue periodic_tail_sum(double period_integral, double beta, long start,
                              const QuadratureConfig& cfg);

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

/// Composite tensor-product Gauss rule on the box [lo, hi] for bounded
/// integrands; `panels` per axis, `order` points per panel.
double integrate_box(const std::function<double(const Eigen::VectorXd&)>& f,
                     const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int panels, int order);

}  // namespace homog

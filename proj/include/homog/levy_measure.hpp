#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "homog/periodic_coeff.hpp"
#include "homog/quadrature.hpp"

namespace homog {

enum class DensityKind { StableLike, Example1ii, TruncatedStable };

const char* to_string(DensityKind kind);

/// Symmetric Levy density nu(h).
///
/// StableLike(beta): |h|^{-d-beta}. Example1ii(beta, gamma):
/// b(h) |h|^{-1-beta} with b the Example1(gamma) profile shifted by 1/2.
/// TruncatedStable(beta, R): |h|^{-1-beta} on 0 < |h| <= R.
class LevyDensity {
 public:
  static LevyDensity stable_like(double beta, int dim = 1);
  static LevyDensity example1ii(double beta, double gamma);
  static LevyDensity truncated_stable(double beta, double radius);

  DensityKind kind() const { return kind_; }
  double beta() const { return beta_; }
  int dim() const { return dim_; }
  double gamma() const { return gamma_; }
  double radius() const { return radius_; }
  bool locally_bounded_away_from_origin() const { return kind_ != DensityKind::Example1ii; }

  /// Periodic factor b of Example1ii.
  const std::optional<PeriodicCoefficient>& periodic_factor() const { return b_; }

  /// nu(h), h != 0; std::nullopt where the periodic factor is unbounded.
  std::optional<double> operator()(double h) const;
  std::optional<double> operator()(const Eigen::Ref<const Eigen::VectorXd>& h) const;

  /// |h|^{-1-beta} part without the periodic factor (1-d).
  double radial(double h) const;

  std::string describe() const;

 private:
  LevyDensity() = default;

  DensityKind kind_ = DensityKind::StableLike;
  double beta_ = 1.0;
  int dim_ = 1;
  double gamma_ = 0.0;
  double radius_ = 0.0;
  std::optional<PeriodicCoefficient> b_;
};

/// The modulated density h -> a(h / delta) nu(h).
struct ModulatedMeasure {
  PeriodicCoefficient a;
  LevyDensity nu;
  double delta = 1.0;

  ModulatedMeasure(PeriodicCoefficient a_, LevyDensity nu_, double delta_);

  /// Integrand form: unbounded sentinels count as 0. Requires h != 0.
  double integrand(double h) const;
  /// integrand(anchor + t) for use with integrate_singular_local.
  double integrand_local(double anchor, double t) const;
  /// a_delta times the periodic factor of nu at anchor + t, without the radial part.
  double periodic_local(double anchor, double t) const;
  /// Singular points of a_delta nu inside [lo, hi], including 0 when it lies there.
  std::vector<double> singular_points(double lo, double hi) const;
  std::vector<double> breakpoints(double lo, double hi) const;
  /// Upper end of the support of nu (+inf unless truncated).
  double support_radius() const;
};

/// a(h / delta) nu(h); DomainError at h = 0.
std::optional<double> modulated_density(const ModulatedMeasure& m, double h);

/// One-sided tail mass: integral over (from, inf) of a_delta nu. Uses the
/// joint period P of the periodic factors, over which
/// sum_l (y + l P)^{-1-beta} is a Hurwitz zeta value, so the infinite tail
/// reduces to one singular quadrature over a single period.
QuadratureOutcome tail_mass(const ModulatedMeasure& m, double from, const QuadratureConfig& cfg = {});

/// Joint period of h -> a(h/delta) b(h); 0 when there is no periodic factor.
double joint_period(const ModulatedMeasure& m);

enum class LevyVerdict { LevyMeasure, NotLevyMeasure, Inconclusive };

struct IntegrabilityReport {
  /// Integral over 0 < |h| <= 1 of |h|^2 a_delta nu (both sides).
  QuadratureOutcome near_origin;
  /// Integral over |h| > 1 of a_delta nu (both sides).
  QuadratureOutcome tail;
  LevyVerdict verdict = LevyVerdict::Inconclusive;
  double value = 0.0;
  /// "near_origin", "tail" or "" when nothing diverged.
  std::string diverged_part;

  bool levy() const { return verdict == LevyVerdict::LevyMeasure; }
};

IntegrabilityReport check_levy_integrability(const ModulatedMeasure& m, const QuadratureConfig& cfg = {});

/// JSON row {beta, gamma, delta, verdict, value, near_origin_error, tail_error}.
std::string to_json_row(const IntegrabilityReport& r, double beta, double gamma, double delta);
const char* to_string(LevyVerdict v);

/// The two constants of the Example 1(ii) finiteness argument, each as the
/// sum of its four pieces over [0,1/4], [1/4,1/2], [1/2,3/4], [3/4,1].
struct Example1Constants {
  std::array<double, 4> c_gamma_pieces{};
  std::array<double, 4> c_pieces{};
  double c_gamma = 0.0;  ///< integral over (0,1) of h^2 a(h) nu(h)
  double c = 0.0;        ///< integral over (0,1) of a(h) b(h)
  double error = 0.0;
  /// 2 c_gamma + 2 c sum_{l>=1} l^{-1-beta}: the finiteness bound.
  double levy_bound = 0.0;
};

Example1Constants example1_constants(double gamma, double beta, const QuadratureConfig& cfg = {});

}  // namespace homog

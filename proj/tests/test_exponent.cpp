#include <cmath>
#include <numbers>

#include "doctest.h"
#include "homog/exponent.hpp"

using namespace homog;

namespace {

// Integral over the line of (1 - cos h) |h|^{-1-beta}.
double stable_constant(double beta) {
  if (beta == 1.0) return std::numbers::pi;
  return 2.0 * std::tgamma(1.0 - beta) * std::cos(0.5 * std::numbers::pi * beta) / beta;
}

// (1 - cos xi h) cos(w h) |h|^{-1-beta} over the line.
double modulated_stable(double beta, double xi, double w) {
  const double c = stable_constant(beta);
  return 0.5 * c * (std::pow(std::abs(w + xi), beta) + std::pow(std::abs(w - xi), beta) - 2.0 * std::pow(w, beta));
}

ExponentSpec constant_spec(double beta, double c = 1.0) {
  return ExponentSpec(ModulatedMeasure(PeriodicCoefficient::constant(c), LevyDensity::stable_like(beta), 1.0));
}

}  // namespace

TEST_CASE("psi of the Cauchy measure") {
  const auto e = constant_spec(1.0);
  CHECK(psi(e, 0.0).value == 0.0);
  CHECK(psi(e, 1.0).value == doctest::Approx(std::numbers::pi).epsilon(1e-10));
  CHECK(psi(e, 2.0).value / psi(e, 1.0).value == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(psi(e, -1.7).value == psi(e, 1.7).value);
  Eigen::VectorXd x(1);
  x << 1.0;
  CHECK(psi(e, x).value == psi(e, 1.0).value);
}

TEST_CASE("psi of stable measures against the Gamma-function constant") {
  for (double beta : {0.3, 0.5, 1.5, 1.8}) {
    const auto e = constant_spec(beta);
    for (double xi : {0.3, 1.0, 7.0}) {
      CHECK(psi(e, xi).value == doctest::Approx(stable_constant(beta) * std::pow(xi, beta)).epsilon(1e-9));
    }
  }
}

TEST_CASE("psi with a cosine coefficient has a two-term closed form") {
  const double amp = 0.5;
  for (double beta : {0.5, 1.5}) {
    for (double delta : {1.0, 0.3, 0.05}) {
      const ExponentSpec e(
          ModulatedMeasure(PeriodicCoefficient::smooth_cosine(amp, 1.0), LevyDensity::stable_like(beta), delta));
      const double w = 2.0 * std::numbers::pi / delta;
      for (double xi : {0.5, 1.0, 4.0}) {
        const double exact = stable_constant(beta) * std::pow(xi, beta) + amp * modulated_stable(beta, xi, w);
        const auto v = psi(e, xi);
        CHECK(v.converged);
        CHECK(v.value == doctest::Approx(exact).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("homogenized exponent") {
  const auto nu = LevyDensity::stable_like(1.0);
  CHECK(psi_homogenized(3.0, nu, 1.0).value == doctest::Approx(3.0 * std::numbers::pi).epsilon(1e-10));
  CHECK(psi_homogenized(0.0, nu, 5.0).value == 0.0);
  CHECK(psi_homogenized(1.0, nu, 0.7).value == psi(constant_spec(1.0), 0.7).value);
}

TEST_CASE("beta homogeneity for the unmodulated measure") {
  for (double beta : {0.5, 1.0, 1.5}) {
    for (double c : {2.0, 3.0, 10.0}) {
      CHECK(homogeneity_error(LevyDensity::stable_like(beta), 1.0, c) <= 1e-8);
    }
  }
}

TEST_CASE("structural properties on singular coefficients") {
  const std::vector<ExponentSpec> specs = {
      ExponentSpec(ModulatedMeasure(PeriodicCoefficient::example1(0.3), LevyDensity::stable_like(1.0), 1.0 / 3.0)),
      ExponentSpec(ModulatedMeasure(PeriodicCoefficient::example1(0.3), LevyDensity::example1ii(1.0, 0.3), 1.0)),
      ExponentSpec(ModulatedMeasure(PeriodicCoefficient::smooth_cosine(0.9, 1.0), LevyDensity::stable_like(0.7), 0.25)),
  };
  for (const auto& e : specs) {
    for (double xi : {0.25, 1.0, 3.0}) {
      const double p = psi(e, xi).value;
      CHECK(p > 0.0);
      CHECK(psi(e, -xi).value == p);
      CHECK(psi(e, 2.0 * xi).value <= 4.0 * p * (1.0 + 1e-9));
    }
    CHECK(negative_definite_min_eigenvalue(e, 0.5, 2.0) >= -1e-7);
  }
}

TEST_CASE("a non-Levy measure is rejected") {
  CHECK_THROWS_AS(
      ExponentSpec(ModulatedMeasure(PeriodicCoefficient::example1(0.6), LevyDensity::example1ii(1.0, 0.6), 0.5)),
      Error);
  try {
    ExponentSpec(ModulatedMeasure(PeriodicCoefficient::example1(0.6), LevyDensity::example1ii(1.0, 0.6), 0.5));
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::NotLevyMeasure);
  }
}

TEST_CASE("truncated exponent drops the small jumps") {
  const auto e = constant_spec(1.0);
  CHECK(psi_truncated(e, 1.3, 0.0).value == psi(e, 1.3).value);
  // 2 int_0^r (1 - cos h) / h^2 dh = r - r^3/36 + r^5/1800 - ...
  const double r = 0.01;
  const double dropped = r - r * r * r / 36.0 + std::pow(r, 5) / 1800.0;
  CHECK(psi(e, 1.0).value - psi_truncated(e, 1.0, r).value == doctest::Approx(dropped).epsilon(1e-8));
  CHECK(psi_truncated(e, 1.0, 2.5).value < psi_truncated(e, 1.0, 0.5).value);
}

TEST_CASE("convergence scans") {
  SUBCASE("constant coefficient rows are exact") {
    const auto rep = exponent_convergence_scan(PeriodicCoefficient::constant(2.0), LevyDensity::stable_like(1.3),
                                               {0.5, 2.0}, {1.0, 0.5, 0.25}, 1e-8);
    CHECK(rep.passed);
    for (const auto& row : rep.rows) CHECK(row.rel_err <= 1e-10);
  }
  SUBCASE("cosine coefficient errors decay with the cell size") {
    const auto rep = exponent_convergence_scan(PeriodicCoefficient::smooth_cosine(0.5, 1.0),
                                               LevyDensity::stable_like(0.5), {1.0},
                                               {0.5, 0.25, 0.125, 0.0625, 0.03125}, 1e-2);
    CHECK(rep.passed);
    for (std::size_t i = 1; i < rep.rows.size(); ++i) CHECK(rep.rows[i].abs_err < rep.rows[i - 1].abs_err);
  }
  SUBCASE("singular pair converges") {
    const auto rep = exponent_convergence_scan(PeriodicCoefficient::example1(0.3), LevyDensity::stable_like(0.6),
                                               {0.5, 1.0, 2.0}, {0.5, 0.125, 1.0 / 32, 1.0 / 128}, 1e-2);
    CHECK(rep.passed);
    CHECK(rep.monotone_deltas);
    CHECK(rep.rows.size() == 12);
  }
  CHECK_THROWS_AS(exponent_convergence_scan(PeriodicCoefficient::constant(1.0), LevyDensity::stable_like(1.0),
                                            {1.0}, {0.5, 1.0}, 1e-2),
                  Error);
}

#include <cmath>
#include <random>

#include "doctest.h"
#include "homog/periodic_coeff.hpp"

using namespace homog;

namespace {

// Closed-form mean of Example1(gamma): 2 * 4^{gamma-1} (2 - gamma) / (1 - gamma).
double example1_mean(double g) { return 2.0 * std::pow(4.0, g - 1.0) * (2.0 - g) / (1.0 - g); }

}  // namespace

TEST_CASE("evaluation examples") {
  CHECK(*PeriodicCoefficient::constant(3.0)(17.25) == 3.0);
  const auto a = PeriodicCoefficient::example1(0.5);
  CHECK(*a(1.0 / 16.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(*a(2.0625) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(*a(0.6) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_FALSE(a(0.0).has_value());
  CHECK_FALSE(a(-3.0).has_value());
  CHECK(a.density(5.0) == 0.0);
  CHECK(a.p_max() == doctest::Approx(2.0));
  CHECK(std::isinf(PeriodicCoefficient::smooth_cosine(0.5, 1.0).p_max()));
}

TEST_CASE("construction rejects invalid parameters") {
  CHECK_THROWS_AS(PeriodicCoefficient::example1(0.0), Error);
  CHECK_THROWS_AS(PeriodicCoefficient::example1(1.0), Error);
  CHECK_THROWS_AS(PeriodicCoefficient::smooth_cosine(1.5, 1.0), Error);
  CHECK_THROWS_AS(PeriodicCoefficient::constant(-1.0), Error);
}

TEST_CASE("periodicity is bit-exact for representable shifts") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> mant(0, (1L << 20) - 1);
  std::uniform_int_distribution<int> kdist(-1000, 1000);
  const std::vector<PeriodicCoefficient> coeffs = {
      PeriodicCoefficient::example1(0.37), PeriodicCoefficient::smooth_cosine(0.5, 1.0),
      shifted_coefficient(PeriodicCoefficient::example1(0.6), 0.5)};
  for (const auto& a : coeffs) {
    for (int i = 0; i < 1000; ++i) {
      const double x = static_cast<double>(mant(rng)) / (1L << 20);
      const double k = kdist(rng);
      const auto lhs = a(x + k);
      const auto rhs = a(x);
      REQUIRE(lhs.has_value() == rhs.has_value());
      if (lhs) CHECK(*lhs == *rhs);
    }
  }
}

TEST_CASE("example1 profile is symmetric about one half") {
  const auto a = PeriodicCoefficient::example1(0.45);
  for (int m = 1; m < 1024; ++m) {
    const double x = m / 1024.0;
    CHECK(*a(x) == *a(1.0 - x));
  }
}

TEST_CASE("mean values") {
  CHECK(mean_value(PeriodicCoefficient::constant(2.5)) == 2.5);
  CHECK(mean_value(PeriodicCoefficient::example1(0.5)) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(example1_mean(0.5) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(mean_value(PeriodicCoefficient::example1(0.25)) ==
        doctest::Approx(2.0 * std::pow(4.0, -0.75) * (1.75 / 0.75)).epsilon(1e-9));
  CHECK(mean_value(PeriodicCoefficient::smooth_cosine(0.5, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  const auto t = PeriodicCoefficient::tensor_product(
      {PeriodicCoefficient::example1(0.3), PeriodicCoefficient::smooth_cosine(0.25, 2.0)});
  CHECK(t.dim() == 2);
  CHECK(mean_value(t) == doctest::Approx(example1_mean(0.3) * 2.0).epsilon(1e-9));
}

TEST_CASE("mean of the rescaled coefficient over one small cell") {
  const auto a = PeriodicCoefficient::example1(0.4);
  const double abar = example1_mean(0.4);
  for (int j = 1; j <= 6; ++j) {
    const double delta = std::ldexp(1.0, -j);
    const auto sing = a.singular_points_scaled(delta, 0.0, delta);
    const auto brk = a.breakpoints_scaled(delta, 0.0, delta);
    const auto out = integrate_singular([&](double h) { return a.density(h / delta); }, 0.0, delta, sing, {}, brk);
    CHECK(out.value() / delta == doctest::Approx(abar).epsilon(1e-8));
  }
  // Bounded tensor product in two dimensions.
  const auto t = PeriodicCoefficient::tensor_product(
      {PeriodicCoefficient::smooth_cosine(0.5, 1.0), PeriodicCoefficient::smooth_cosine(0.3, 2.0)});
  for (double delta : {0.5, 0.125}) {
    Eigen::VectorXd lo = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(2, delta);
    const double v = integrate_box(
        [&](const Eigen::VectorXd& x) { return *t(Eigen::VectorXd(x / delta)); }, lo, hi, 4, 12);
    CHECK(v / (delta * delta) == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("L^p membership follows p < 1/gamma") {
  const double gamma = 0.4;
  const auto a = PeriodicCoefficient::example1(gamma);
  for (double p : {1.5, 2.0, 2.4}) CHECK(power_integral(a, p).converged());
  for (double p : {2.5, 3.0}) CHECK(power_integral(a, p).divergent());
}

TEST_CASE("shifted coefficient") {
  const auto b = shifted_coefficient(PeriodicCoefficient::example1(0.5), 0.5);
  CHECK(*b(0.5 + 1.0 / 16.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(b.singular_points_in_q() == std::vector<double>{0.5});
  CHECK_FALSE(b(0.5).has_value());
  const auto c = shifted_coefficient(PeriodicCoefficient::constant(1.7), 0.3);
  CHECK(c.kind() == CoefficientKind::Constant);
  CHECK(*c(0.1) == 1.7);
  const auto t = PeriodicCoefficient::tensor_product(
      {PeriodicCoefficient::constant(1.0), PeriodicCoefficient::constant(2.0)});
  CHECK_THROWS_AS(shifted_coefficient(t, 0.5), Error);
}

TEST_CASE("cosine series of the singular profile") {
  const auto a = PeriodicCoefficient::example1(0.3);
  const auto c = cosine_coefficients(a, 64);
  // Partial Fourier sum against the profile away from the singularity, in L^2 sense:
  // Parseval, integral of a^2 = c0^2 + sum c_k^2 / 2, with a slowly decaying tail.
  double parseval = c[0] * c[0];
  for (int k = 1; k < 64; ++k) parseval += 0.5 * c[k] * c[k];
  const double l2 = power_integral(a, 2.0).value();
  CHECK(parseval < l2);
  CHECK(parseval > 0.95 * l2);
  const auto s = cosine_coefficients(PeriodicCoefficient::smooth_cosine(0.5, 1.0), 4);
  CHECK(s == std::vector<double>{1.0, 0.5, 0.0, 0.0});
}

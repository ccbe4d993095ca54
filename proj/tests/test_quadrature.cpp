#include <cmath>
#include <vector>

#include "doctest.h"
#include "homog/quadrature.hpp"

using namespace homog;

namespace {

// Composite fixed-order Gauss reference, independent of the adaptive code.
double composite_gauss(const std::function<double(double)>& f, double a, double b, int panels) {
  const auto rule = gauss_legendre(20);
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (int j = 0; j < 20; ++j) s += 0.5 * h * rule.weights[j] * f(c + 0.5 * h * rule.nodes[j]);
  }
  return s;
}

const std::vector<double> kZero{0.0};

}  // namespace

TEST_CASE("inverse square root converges to 2") {
  const auto out = integrate_singular([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, kZero, {});
  REQUIRE(out.converged());
  CHECK(out.value() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(out.error() <= std::max(1e-8 * 2.0, 1e-12));
}

TEST_CASE("1/x is divergent with logarithmic growth") {
  const auto out = integrate_singular([](double x) { return 1.0 / x; }, 0.0, 1.0, kZero, {});
  REQUIRE(out.divergent());
  CHECK(std::get<Divergent>(out.verdict).growth_exponent == doctest::Approx(0.0).epsilon(0.01));
}

TEST_CASE("collision integrand blows up for 2 gamma >= 1") {
  const double beta = 1.0;
  const double gamma = 0.6;
  const std::vector<double> half{0.5};
  const auto out = integrate_singular(
      [&](double h) { return std::pow(h, 1.0 - beta) * std::pow(1.0 - 2.0 * h, -2.0 * gamma); }, 0.375, 0.5,
      half, {});
  REQUIRE(out.divergent());
  CHECK(std::get<Divergent>(out.verdict).growth_exponent == doctest::Approx(0.2).epsilon(0.02));
}

TEST_CASE("slowly convergent power is extrapolated") {
  // x^{-0.95}: shell ratio 4^{-0.05}, the tail carries most of the mass.
  const auto out = integrate_singular([](double x) { return std::pow(x, -0.95); }, 0.0, 1.0, kZero, {});
  REQUIRE(out.converged());
  CHECK(out.value() == doctest::Approx(20.0).epsilon(1e-7));
}

TEST_CASE("singular point at the right end and in the interior") {
  const std::vector<double> pts{0.3};
  const auto out = integrate_singular([](double x) { return std::pow(std::abs(x - 0.3), -0.5); }, 0.0, 1.0,
                                      pts, {});
  REQUIRE(out.converged());
  CHECK(out.value() == doctest::Approx(2.0 * (std::sqrt(0.3) + std::sqrt(0.7))).epsilon(1e-9));
}

TEST_CASE("smooth integrands match a composite Gauss reference") {
  const std::vector<std::function<double(double)>> fs = {
      [](double x) { return std::exp(std::sin(3.0 * x)); },
      [](double x) { return 1.0 / (1.0 + 25.0 * x * x); },
      [](double x) { return std::cos(40.0 * x) * x * x; },
  };
  for (const auto& f : fs) {
    const double ref = composite_gauss(f, -1.0, 2.0, 256);
    const auto out = integrate_smooth(f, -1.0, 2.0, {});
    REQUIRE(out.converged());
    CHECK(std::abs(out.value() - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("linearity within combined error estimates") {
  const auto f = [](double x) { return std::pow(x, -0.3); };
  const auto g = [](double x) { return std::pow(x, -0.6) + x; };
  const auto of = integrate_singular(f, 0.0, 1.0, kZero, {});
  const auto og = integrate_singular(g, 0.0, 1.0, kZero, {});
  const auto ofg = integrate_singular([&](double x) { return 2.0 * f(x) - 3.0 * g(x); }, 0.0, 1.0, kZero, {});
  const double combined = 2.0 * of.error() + 3.0 * og.error() + ofg.error();
  CHECK(std::abs(ofg.value() - (2.0 * of.value() - 3.0 * og.value())) <= combined + 1e-14);
}

TEST_CASE("verdicts are stable under halving rel_tol") {
  struct Case {
    std::function<double(double)> f;
    double lo, hi, s;
  };
  const std::vector<Case> suite = {
      {[](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 0.0},
      {[](double x) { return 1.0 / x; }, 0.0, 1.0, 0.0},
      {[](double h) { return std::pow(1.0 - 2.0 * h, -1.2); }, 0.375, 0.5, 0.5},
      {[](double x) { return std::pow(x, -0.8) * std::cos(x); }, 0.0, 2.0, 0.0},
  };
  for (const auto& c : suite) {
    QuadratureConfig cfg;
    const std::vector<double> s{c.s};
    const auto a = integrate_singular(c.f, c.lo, c.hi, s, cfg);
    cfg.rel_tol *= 0.5;
    const auto b = integrate_singular(c.f, c.lo, c.hi, s, cfg);
    CHECK(a.converged() == b.converged());
    CHECK(a.divergent() == b.divergent());
  }
}

TEST_CASE("graded mesh error decays monotonically with refinement level") {
  const double gamma = 0.3;
  const double exact = 1.0 / (1.0 - gamma);
  double last = 1e300;
  for (int level = 1; level <= 30; ++level) {
    QuadratureConfig cfg;
    cfg.max_refinements = level;
    const auto out = integrate_singular([&](double x) { return std::pow(x, -gamma); }, 0.0, 1.0, kZero, cfg);
    const double v = out.converged() ? out.value() : std::get<Inconclusive>(out.verdict).partial;
    const double err = std::abs(v - exact);
    if (out.converged()) {
      CHECK(err <= 1e-8 * exact);
      break;
    }
    CHECK(err < last);
    last = err;
  }
}

TEST_CASE("hurwitz zeta and periodic tail sums") {
  SUBCASE("zeta(2) against the standard library and brute force") {
    const auto z = periodic_tail_sum(1.0, 1.0, 1, {});
    CHECK(z.value == doctest::Approx(std::riemann_zeta(2.0)).epsilon(1e-14));
    CHECK(z.error < 1e-12);
    // Brute force to 1e7 plus the integral-test remainder 1/N.
    double brute = 0.0;
    const long n = 10'000'000;
    for (long l = n; l >= 1; --l) brute += 1.0 / (static_cast<double>(l) * l);
    brute += 1.0 / static_cast<double>(n);
    CHECK(z.value == doctest::Approx(brute).epsilon(1e-13));
  }
  SUBCASE("zero prefactor and linearity") {
    CHECK(periodic_tail_sum(0.0, 0.7, 3, {}).value == 0.0);
    const double c = 3.25;
    CHECK(periodic_tail_sum(c, 1.0, 1, {}).value ==
          doctest::Approx(c * periodic_tail_sum(1.0, 1.0, 1, {}).value).epsilon(1e-15));
  }
  SUBCASE("hurwitz at small and large offsets") {
    for (double s : {1.1, 1.5, 2.5}) {
      for (double q : {0.01, 0.5, 1.0, 7.3, 120.0}) {
        double ref = 0.0;
        const long n = 2'000'000;
        for (long l = n - 1; l >= 0; --l) ref += std::pow(q + l, -s);
        ref += std::pow(q + n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(q + n, -s);
        CHECK(hurwitz_zeta(s, q).value == doctest::Approx(ref).epsilon(1e-10));
      }
    }
  }
  CHECK_THROWS_AS(hurwitz_zeta(1.0, 1.0), Error);
}

TEST_CASE("gauss legendre and tensor box rules") {
  const auto rule = gauss_legendre(5);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], 8);
  CHECK(s == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
  Eigen::VectorXd lo(2), hi(2);
  lo << 0.0, -1.0;
  hi << 1.0, 2.0;
  const double v = integrate_box([](const Eigen::VectorXd& x) { return x[0] * x[0] * x[1]; }, lo, hi, 2, 4);
  CHECK(v == doctest::Approx(0.5).epsilon(1e-13));  // (1/3) * (3/2)
}

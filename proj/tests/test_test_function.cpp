#include <cmath>
#include <complex>

#include "doctest.h"
#include "homog/test_function.hpp"

using namespace homog;

TEST_CASE("tent values and support") {
  const auto u = TestFunction::tent(1.0, 2.0);
  CHECK(u(1.0) == doctest::Approx(1.0));
  CHECK(u(2.0) == doctest::Approx(0.5));
  CHECK(u(-1.5) == 0.0);
  CHECK(u.support_lo() == doctest::Approx(-1.0));
  CHECK(u.support_hi() == doctest::Approx(3.0));
  CHECK(u.lipschitz_constant() == doctest::Approx(0.5));
}

TEST_CASE("piecewise linear validation") {
  CHECK_THROWS(TestFunction::piecewise_linear({0.0, 1.0, 0.5}, {0.0, 1.0, 0.0}));
  CHECK_THROWS(TestFunction::piecewise_linear({0.0, 1.0, 2.0}, {0.0, 1.0, 0.5}));
}

TEST_CASE("fourier transform of the unit tent") {
  const auto u = TestFunction::tent(0.0, 1.0);
  for (double xi : {0.1, 0.7, 3.0, 25.0}) {
    const double s = std::sin(0.5 * xi) / (0.5 * xi);
    CHECK(std::abs(u.fourier(xi) - std::complex<double>(s * s, 0.0)) < 1e-10);
    CHECK(std::abs(u.fourier(xi)) <= u.fourier_decay_constant() / (xi * xi) + 1e-14);
  }
  const auto t = u.translated(2.0);
  CHECK(std::abs(t.fourier(1.3) - std::exp(std::complex<double>(0.0, -2.6)) * u.fourier(1.3)) < 1e-10);
}

TEST_CASE("bump transform against quadrature") {
  const auto b = TestFunction::smooth_bump(0.3, 0.8);
  CHECK(b(0.3) == doctest::Approx(1.0));
  CHECK(b(1.2) == 0.0);
  for (double xi : {0.0, 2.0, 9.0}) {
    std::complex<double> s = 0.0;
    const int n = 20000;
    const double h = 1.6 / n;
    for (int i = 0; i < n; ++i) {
      const double x = -0.5 + (i + 0.5) * h;
      s += b(x) * std::exp(std::complex<double>(0.0, -xi * x)) * h;
    }
    CHECK(std::abs(b.fourier(xi) - s) < 1e-7);
  }
}

TEST_CASE("algebra") {
  const auto u = TestFunction::tent(0.0, 1.0);
  const auto v = TestFunction::smooth_bump(0.5, 1.0);
  const auto w = u + v.scaled(2.0);
  for (double x : {-0.7, 0.2, 0.9, 1.4}) CHECK(w(x) == doctest::Approx(u(x) + 2.0 * v(x)));
  CHECK(u.dilated(2.0)(0.25) == doctest::Approx(0.5));
  CHECK(TestFunction::inner_product(u, u) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  const auto c = TestFunction::piecewise_linear({-1.0, 0.0, 1.0}, {0.0, 2.0, 0.0}).unit_contraction();
  CHECK(c(0.0) == doctest::Approx(1.0));
  CHECK(c(0.75) == doctest::Approx(0.5));
  CHECK(c(-0.25) == doctest::Approx(1.0));
}

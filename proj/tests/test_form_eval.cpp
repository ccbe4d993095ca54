#include <cmath>
#include <numbers>

#include "doctest.h"
#include "homog/form_eval.hpp"

using namespace homog;

namespace {

ModulatedMeasure stable(double beta, PeriodicCoefficient a = PeriodicCoefficient::constant(1.0), double delta = 1.0) {
  return ModulatedMeasure(std::move(a), LevyDensity::stable_like(beta), delta);
}

// Brute force: Simpson in x for the correlation, z = w^2 substitution and
// composite midpoint in w, then the closed-form tail past the support width.
double brute_form(const TestFunction& u, const ModulatedMeasure& m) {
  const double lo = u.support_lo();
  const double hi = u.support_hi();
  const double width = hi - lo;
  auto corr = [&](double z) {
    const int n = 4000;
    const double a = lo - z;
    const double h = (hi - a) / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double x = a + i * h;
      const double d = u(x) - u(x + z);
      s += (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0)) * d * d;
    }
    return s * h / 3.0;
  };
  const int nw = 3000;
  const double wmax = std::sqrt(width);
  double near = 0.0;
  for (int i = 0; i < nw; ++i) {
    const double w = (i + 0.5) * wmax / nw;
    const double z = w * w;
    near += corr(z) * m.integrand(z) * 2.0 * w;
  }
  near *= wmax / nw;
  const double uu = TestFunction::inner_product(u, u);
  return 2.0 * (near + 2.0 * uu * tail_mass(m, width).value());
}

}  // namespace

TEST_CASE("tent energy closed forms") {
  const auto u = TestFunction::tent(0.0, 1.0);
  CHECK(form_direct(u, stable(1.0)).value == doctest::Approx(8.0 * std::log(2.0)).epsilon(1e-9));
  CHECK(form_direct(u, stable(0.5)).value == doctest::Approx(7.06924479783415546).epsilon(1e-9));
  CHECK(form_direct(u, stable(1.5)).value == doctest::Approx(8.33118489069375925).epsilon(1e-9));
}

TEST_CASE("direct form against a brute-force oracle") {
  const auto u = TestFunction::tent(0.2, 0.7);
  for (double delta : {1.0, 0.3}) {
    const auto m = stable(0.5, PeriodicCoefficient::smooth_cosine(0.5, 1.0), delta);
    CHECK(form_direct(u, m).value == doctest::Approx(brute_form(u, m)).epsilon(2e-4));
  }
}

TEST_CASE("difference correlation of the tent") {
  const auto u = TestFunction::tent(0.0, 1.0);
  // 2 z^2 - z^3 on [0, 1] for the unit tent, 2 <u,u> = 4/3 past the support.
  CHECK(difference_correlation(u, u, 0.5) == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(difference_correlation(u, u, 3.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(difference_correlation(u, u, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("structural properties") {
  const auto u = TestFunction::tent(0.0, 1.0);
  const auto v = TestFunction::piecewise_linear({-0.5, 0.1, 0.8, 1.5}, {0.0, 1.2, -0.4, 0.0});
  const auto m = stable(0.8, PeriodicCoefficient::example1(0.3), 0.25);
  SUBCASE("symmetry") {
    CHECK(form_direct(u, v, m).value == doctest::Approx(form_direct(v, u, m).value).epsilon(1e-8));
  }
  SUBCASE("parallelogram law") {
    const double lhs = form_direct(u + v, m).value + form_direct(u - v, m).value;
    const double rhs = 2.0 * form_direct(u, m).value + 2.0 * form_direct(v, m).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
  SUBCASE("translation invariance") {
    CHECK(form_direct(v.translated(0.37), m).value == doctest::Approx(form_direct(v, m).value).epsilon(1e-7));
  }
  SUBCASE("scaling for the stable kernel") {
    const double beta = 0.8;
    const auto m1 = stable(beta);
    CHECK(form_direct(v.dilated(2.0), m1).value ==
          doctest::Approx(std::pow(2.0, beta - 1.0) * form_direct(v, m1).value).epsilon(1e-8));
  }
  SUBCASE("unit contraction lowers the energy") {
    const auto w = TestFunction::piecewise_linear({-1.0, -0.3, 0.4, 1.0}, {0.0, 1.8, -0.6, 0.0});
    CHECK(form_direct(w.unit_contraction(), m).value < form_direct(w, m).value);
  }
}

TEST_CASE("spectral calibration and agreement") {
  const auto& cal = spectral_calibration();
  CHECK(cal.constant == doctest::Approx(4.0 * std::numbers::pi));
  const auto u = TestFunction::tent(0.0, 1.0);
  const auto m = stable(0.5, PeriodicCoefficient::example1(0.3), 0.25);
  const auto d = form_direct(u, m);
  const auto s = form_spectral(u, ExponentSpec(m), 1e-4);
  CHECK(std::abs(d.value - s.value) <= d.error + s.error);
  CHECK(std::abs(d.value - s.value) <= 1e-3 * d.value);
}

TEST_CASE("weak convergence checks") {
  const std::vector<double> deltas = {0.5, 0.25, 0.125, 0.0625, 1.0 / 32, 1.0 / 64};
  const auto g = TestFunction::tent(0.0, 1.0);
  const auto rep = vague_convergence_check(g, PeriodicCoefficient::smooth_cosine(0.5, 1.0), deltas, 1e-2);
  CHECK(rep.passed);
  CHECK(rep.rows.size() == deltas.size());

  const auto a = PeriodicCoefficient::example1(0.4);
  CHECK_THROWS_AS(weak_lp_check({[](double) { return 1.0; }, {}, "one"}, 0.0, 1.0, a, 3.0, deltas, 1e-2), Error);
  const auto lp = lp_bound_check(a, 2.0, 3, {0.7, 0.3, 0.11, 0.05});
  CHECK(lp.violations == 0);
  CHECK(lp.rows.size() == 4);
}

TEST_CASE("Mosco conditions on a short sequence") {
  const auto u = TestFunction::tent(0.0, 1.0);
  const auto a = PeriodicCoefficient::smooth_cosine(0.5, 1.0);
  const auto nu = LevyDensity::stable_like(1.0);
  const std::vector<double> deltas = {0.5, 0.25, 0.125, 1.0 / 16, 1.0 / 32};
  const auto m2 = mosco_m2_check(u, a, nu, deltas, 2e-2);
  CHECK(m2.passed);
  const auto m1 = m1_necessary_check(m1_catalog(u), a, nu, deltas, 2e-2);
  CHECK(m1.violations == 0);
  CHECK(m1.entries.size() == 3);
}

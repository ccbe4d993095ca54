#include "homog/exponent.hpp"

#include <cmath>
#include <complex>
#include <optional>

#include <Eigen/Eigenvalues>

#include "homog/parallel.hpp"

namespace homog {

namespace {

using cplx = std::complex<double>;

constexpr double kSplit = 1.0;

struct Partial {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

void accumulate(Partial& p, const QuadratureOutcome& o) {
  if (o.divergent()) throw Error(ErrorKind::InternalConsistency, "exponent integral diverged for a Levy measure");
  if (o.converged()) {
    p.value += o.value();
    p.error += o.error();
  } else {
    const auto& i = std::get<Inconclusive>(o.verdict);
    p.value += i.partial;
    p.error += i.error;
    p.converged = false;
  }
}

// Integral over tau > 0 of tau^beta e^{-tau} / (1 - z e^{-tau/v}), z = e^{i theta} != 1.
// Times v^{-1-beta} / Gamma(1+beta) this is the Lerch sum sum_j z^j (v + j)^{-1-beta}.
cplx lerch_kernel(double beta, double theta, double v, double& err) {
  const cplx z = std::polar(1.0, theta);
  const double s = std::sin(0.5 * theta);
  const cplx one_minus_z(2.0 * s * s, -std::sin(theta));
  auto f = [&](double tau) -> cplx {
    if (tau == 0.0) return 0.0;
    const cplx denom = one_minus_z - z * std::expm1(-tau / v);
    return std::pow(tau, beta) * std::exp(-tau) / denom;
  };
  const double scale = std::min(1.0, v * std::abs(one_minus_z));
  cplx total = 0.0;
  double hi = 45.0;
  while (hi > 1e-3 * scale && hi > 1e-12) {
    const double lo = 0.25 * hi;
    const auto r = adaptive_gauss_kronrod<cplx>(f, lo, hi, 1e-16, 1e-12, 200);
    total += r.value;
    err += r.error;
    hi = lo;
  }
  const auto r = adaptive_gauss_kronrod<cplx>(f, 0.0, hi, 1e-16, 1e-12, 200);
  total += r.value;
  err += r.error;
  return total;
}

// Chebyshev interpolant of the Lerch kernel in v over [v0, v1]; the kernel
// is analytic in v > 0, so a few dozen nodes reach rounding level.
class LerchTable {
 public:
  LerchTable(double beta, double theta, double v0, double v1) : v0_(v0), v1_(v1) {
    for (int n = 16; n <= 128; n *= 2) {
      build(beta, theta, n);
      double worst = 0.0;
      double scale = 0.0;
      for (double u : {-0.77, -0.31, 0.13, 0.58, 0.91}) {
        double e = 0.0;
        const double v = 0.5 * (v0_ + v1_) + 0.5 * (v1_ - v0_) * u;
        const cplx exact = lerch_kernel(beta, theta, v, e);
        worst = std::max(worst, std::abs(exact - (*this)(v)) + e);
        scale = std::max(scale, std::abs(exact));
      }
      error_ = worst;
      if (worst <= 1e-12 * scale) break;
    }
  }

  cplx operator()(double v) const {
    const double x = (2.0 * v - v0_ - v1_) / (v1_ - v0_);
    cplx b1 = 0.0;
    cplx b2 = 0.0;
    for (std::size_t k = coef_.size(); k-- > 1;) {
      const cplx b0 = 2.0 * x * b1 - b2 + coef_[k];
      b2 = b1;
      b1 = b0;
    }
    return x * b1 - b2 + coef_[0];
  }

  double error() const { return error_; }

 private:
  void build(double beta, double theta, int n) {
    std::vector<cplx> vals(n);
    for (int j = 0; j < n; ++j) {
      const double x = std::cos(std::numbers::pi * (j + 0.5) / n);
      double e = 0.0;
      vals[j] = lerch_kernel(beta, theta, 0.5 * (v0_ + v1_) + 0.5 * (v1_ - v0_) * x, e);
    }
    coef_.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
      cplx s = 0.0;
      for (int j = 0; j < n; ++j) s += vals[j] * std::cos(std::numbers::pi * k * (j + 0.5) / n);
      coef_[k] = s * (2.0 / n);
    }
    coef_[0] *= 0.5;
  }

  double v0_;
  double v1_;
  std::vector<cplx> coef_;
  double error_ = 0.0;
};

// Sum over j >= 0 of (1 - cos(xi (h + jP))) (h + jP)^{-1-beta}.
double periodic_tail_kernel(double beta, double xi, double period, double h, const LerchTable* table,
                            double& err) {
  const double s1 = 1.0 + beta;
  const auto z = hurwitz_zeta(s1, h / period);
  const double zeta = std::pow(period, -s1) * z.value;
  err += std::pow(period, -s1) * z.error;
  double cos_part;
  if (table == nullptr) {
    cos_part = std::cos(xi * h) * zeta;
  } else {
    const cplx k = (*table)(h / period);
    const double pref = std::pow(h, -s1) / std::tgamma(s1);
    cos_part = pref * (std::polar(1.0, xi * h) * k).real();
    err += pref * table->error();
  }
  return zeta - cos_part;
}

// Both half-lines are equal; everything below integrates over h > 0.
// The line is split at `split`: direct quadrature below, and above it a
// single period of the coefficient with the sum over translates in closed
// form. A constant coefficient has every period, so the period is matched
// to the oscillation of the cosine.
Partial half_line(const ExponentSpec& e, double xi, double r) {
  const ModulatedMeasure& m = e.measure;
  const QuadratureConfig& cfg = e.cfg;
  Partial p;
  const double R = m.support_radius();
  const double wave = 2.0 * std::numbers::pi / xi;
  double period = joint_period(m);
  double split;
  if (period == 0.0) {
    period = wave;
    split = std::max(std::min(kSplit, wave), r);
  } else {
    split = std::max(std::max(period, std::min(kSplit, wave)), r);
  }
  if (r < split) {
    const double hi = std::min(split, R);
    if (r < hi) {
      auto f = [&m, xi](double s, double t) {
        const double h = s + t;
        const double sn = std::sin(0.5 * xi * h);
        return 2.0 * sn * sn * m.integrand_local(s, t);
      };
      accumulate(p, integrate_singular_local(f, r, hi, m.singular_points(r, hi), cfg, m.breakpoints(r, hi)));
    }
  }
  if (split >= R) return p;
  if (m.nu.kind() == DensityKind::TruncatedStable) {
    auto f = [&m, xi](double s, double t) { return (1.0 - std::cos(xi * (s + t))) * m.integrand_local(s, t); };
    accumulate(p, integrate_singular_local(f, split, R, m.singular_points(split, R), cfg, m.breakpoints(split, R)));
    return p;
  }
  const double beta = m.nu.beta();
  const double theta = std::remainder(xi * period, 2.0 * std::numbers::pi);
  std::optional<LerchTable> table;
  if (std::abs(theta) >= 1e-12) table.emplace(beta, theta, split / period, split / period + 1.0);
  double kernel_err = 0.0;
  auto f = [&](double s, double t) {
    const double g = m.periodic_local(s, t);
    if (g == 0.0) return 0.0;
    double local_err = 0.0;
    const double k = periodic_tail_kernel(beta, xi, period, s + t, table ? &*table : nullptr, local_err);
    kernel_err = std::max(kernel_err, local_err * g);
    return g * k;
  };
  const double hi = split + period;
  accumulate(p, integrate_singular_local(f, split, hi, m.singular_points(split, hi), cfg, m.breakpoints(split, hi)));
  p.error += kernel_err * period;
  return p;
}

ExponentValue evaluate(const ExponentSpec& e, double xi, double r) {
  xi = std::abs(xi);
  if (!std::isfinite(xi)) throw Error(ErrorKind::Domain, "psi requires a finite frequency");
  if (xi == 0.0) return {};
  const Partial p = half_line(e, xi, r);
  return {2.0 * p.value, 2.0 * p.error, p.converged};
}

}  // namespace

ExponentSpec::ExponentSpec(ModulatedMeasure m, QuadratureConfig c)
    : measure(std::move(m)), cfg(c), integrability(check_levy_integrability(measure, cfg)) {
  if (!integrability.levy()) {
    throw Error(ErrorKind::NotLevyMeasure, "measure " + measure.a.describe() + " x " + measure.nu.describe() +
                                               " fails the Levy check (" + to_string(integrability.verdict) +
                                               (integrability.diverged_part.empty() ? "" : ", " + integrability.diverged_part) +
                                               ")");
  }
}

ExponentValue psi(const ExponentSpec& e, double xi) { return evaluate(e, xi, 0.0); }

ExponentValue psi(const ExponentSpec& e, const Eigen::Ref<const Eigen::VectorXd>& xi) {
  if (xi.size() != 1) throw Error(ErrorKind::UnsupportedDimension, "psi is implemented for d = 1");
  return psi(e, xi[0]);
}

ExponentValue psi_truncated(const ExponentSpec& e, double xi, double r) {
  if (!(r >= 0.0)) throw Error(ErrorKind::Domain, "cutoff must be nonnegative");
  return evaluate(e, xi, r);
}

ExponentValue psi_homogenized(double abar, const LevyDensity& nu, double xi, const QuadratureConfig& cfg) {
  if (!(abar >= 0.0)) throw Error(ErrorKind::Domain, "mean value must be nonnegative");
  if (abar == 0.0) return {};
  const ExponentSpec e(ModulatedMeasure(PeriodicCoefficient::constant(1.0, nu.dim()), nu, 1.0), cfg);
  auto v = psi(e, xi);
  v.value *= abar;
  v.error *= abar;
  return v;
}

ConvergenceReport exponent_convergence_scan(const PeriodicCoefficient& a, const LevyDensity& nu,
                                            const std::vector<double>& xi_grid,
                                            const std::vector<double>& deltas, double tolerance,
                                            const QuadratureConfig& cfg) {
  if (xi_grid.empty() || deltas.empty()) throw Error(ErrorKind::Validation, "scan grids must be nonempty");
  ConvergenceReport rep;
  rep.check = "exponent_scan";
  rep.tolerance = tolerance;
  rep.monotone_deltas = strictly_decreasing(deltas);
  if (!rep.monotone_deltas) throw Error(ErrorKind::Validation, "delta sequence must be strictly decreasing");
  const double abar = mean_value(a, cfg);
  std::vector<ExponentValue> limits(xi_grid.size());
  parallel_for(xi_grid.size(), [&](std::size_t i) { limits[i] = psi_homogenized(abar, nu, xi_grid[i], cfg); });
  std::vector<std::optional<ExponentSpec>> specs(deltas.size());
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    try {
      specs[d].emplace(ModulatedMeasure(a, nu, deltas[d]), cfg);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::NotLevyMeasure) throw;
      throw Error(ErrorKind::NotLevyMeasure, "delta = " + format_double(deltas[d]) + ": " + err.what());
    }
  }
  rep.rows.resize(deltas.size() * xi_grid.size());
  parallel_for(rep.rows.size(), [&](std::size_t k) {
    const std::size_t d = k / xi_grid.size();
    const std::size_t i = k % xi_grid.size();
    const auto v = psi(*specs[d], xi_grid[i]);
    ConvergenceRow& row = rep.rows[k];
    row.delta = deltas[d];
    row.xi = xi_grid[i];
    row.value = v.value;
    row.limit = limits[i].value;
    row.abs_err = std::abs(v.value - limits[i].value);
    row.rel_err = limits[i].value > 0.0 ? row.abs_err / limits[i].value : row.abs_err;
    row.error_estimate = v.error + limits[i].error;
  });
  rep.final_error = final_rel_error(rep.rows);
  rep.passed = rep.final_error <= tolerance;
  return rep;
}

double negative_definite_min_eigenvalue(const ExponentSpec& e, double xi1, double xi2) {
  const std::array<double, 3> x = {0.0, xi1, xi2};
  Eigen::Matrix3d M;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      M(i, j) = psi(e, x[i]).value + psi(e, x[j]).value - psi(e, x[i] - x[j]).value;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(M, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double homogeneity_error(const LevyDensity& nu, double xi, double c, const QuadratureConfig& cfg) {
  const ExponentSpec e(ModulatedMeasure(PeriodicCoefficient::constant(1.0), nu, 1.0), cfg);
  const double big = psi(e, c * xi).value;
  const double small = psi(e, xi).value;
  return std::abs(big - std::pow(c, nu.beta()) * small) / big;
}

}  // namespace homog

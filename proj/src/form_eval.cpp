#include "homog/form_eval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "homog/parallel.hpp"

namespace homog {

const char* to_string(FormMethod m) { return m == FormMethod::Direct ? "direct" : "spectral"; }

namespace {

const GaussRule& rule3() {
  static const GaussRule r = gauss_legendre(3);
  return r;
}

const GaussRule& rule20() {
  static const GaussRule r = gauss_legendre(20);
  return r;
}

// Sorted unique points within [lo, hi], endpoints included.
std::vector<double> clip_sorted(std::vector<double> pts, double lo, double hi) {
  pts.push_back(lo);
  pts.push_back(hi);
  std::vector<double> out;
  for (double p : pts) {
    if (p >= lo && p <= hi) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> structure_points(const TestFunction& u, double& min_radius) {
  std::vector<double> pts = u.kinks();
  pts.push_back(u.support_lo());
  pts.push_back(u.support_hi());
  if (!u.piecewise_linear_only()) min_radius = std::min(min_radius, 0.5 * (u.support_hi() - u.support_lo()));
  return pts;
}

QuadratureOutcome require_finite(const QuadratureOutcome& o, const char* what) {
  if (o.divergent()) throw Error(ErrorKind::QuadratureFailure, std::string(what) + ": " + o.describe());
  return o;
}

double partial_value(const QuadratureOutcome& o) {
  if (o.converged()) return o.value();
  if (const auto* i = std::get_if<Inconclusive>(&o.verdict)) return i->partial;
  return std::get<Divergent>(o.verdict).partial;
}

}  // namespace

double difference_correlation(const TestFunction& u, const TestFunction& v, double z) {
  if (u.is_zero() || v.is_zero()) return 0.0;
  double min_radius = std::numeric_limits<double>::infinity();
  std::vector<double> pts;
  for (const TestFunction* w : {&u, &v}) {
    for (double p : structure_points(*w, min_radius)) {
      pts.push_back(p);
      pts.push_back(p - z);
    }
  }
  const double lo = std::min(u.support_lo(), v.support_lo()) - std::max(z, 0.0);
  const double hi = std::max(u.support_hi(), v.support_hi()) - std::min(z, 0.0);
  pts = clip_sorted(std::move(pts), lo, hi);
  const bool linear = u.piecewise_linear_only() && v.piecewise_linear_only();
  const GaussRule& rule = linear ? rule3() : rule20();
  double s = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double a = pts[i - 1];
    const double b = pts[i];
    if (!(b > a)) continue;
    const int panels = linear ? 1 : std::max(1, static_cast<int>(std::ceil(8.0 * (b - a) / min_radius)));
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double c = a + (p + 0.5) * h;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double x = c + 0.5 * h * rule.nodes[j];
        s += 0.5 * h * rule.weights[j] * (u(x) - u(x + z)) * (v(x) - v(x + z));
      }
    }
  }
  return s;
}

FormValue form_direct(const TestFunction& u, const TestFunction& v, const ModulatedMeasure& m,
                      const QuadratureConfig& cfg) {
  if (m.a.dim() != 1) throw Error(ErrorKind::UnsupportedDimension, "forms are implemented for d = 1");
  if (!m.a.even()) throw Error(ErrorKind::Validation, "coefficient must be even for a symmetric form");
  FormValue out;
  out.method = FormMethod::Direct;
  if (u.is_zero() || v.is_zero()) return out;
  const double lo = std::min(u.support_lo(), v.support_lo());
  const double hi = std::max(u.support_hi(), v.support_hi());
  const double width = hi - lo;
  const double zmax = std::min(width, m.support_radius());
  // The z-integrand has kinks where z matches a difference of kink points.
  std::vector<double> kinks = u.kinks();
  kinks.insert(kinks.end(), v.kinks().begin(), v.kinks().end());
  std::vector<double> zbreaks = m.breakpoints(0.0, zmax);
  for (double p : kinks) {
    for (double q : kinks) {
      if (q - p > 0.0 && q - p < zmax) zbreaks.push_back(q - p);
    }
  }
  std::sort(zbreaks.begin(), zbreaks.end());
  zbreaks.erase(std::unique(zbreaks.begin(), zbreaks.end()), zbreaks.end());
  auto f = [&](double s, double t) {
    const double z = s + t;
    const double k = m.integrand_local(s, t);
    return k == 0.0 ? 0.0 : difference_correlation(u, v, z) * k;
  };
  const auto near = require_finite(integrate_singular_local(f, 0.0, zmax, m.singular_points(0.0, zmax), cfg, zbreaks),
                                   "form_direct near the diagonal");
  double value = partial_value(near);
  double error = near.error();
  bool converged = near.converged();
  if (width < m.support_radius()) {
    // Beyond the support width the correlation is constant: 2 <u, v>.
    const double uv = TestFunction::inner_product(u, v);
    const auto tail = require_finite(tail_mass(m, width, cfg), "form_direct tail");
    value += 2.0 * uv * partial_value(tail);
    error += 2.0 * std::abs(uv) * tail.error();
    converged = converged && tail.converged();
  }
  out.value = 2.0 * value;
  out.error = 2.0 * error;
  out.converged = converged;
  return out;
}

FormValue form_direct(const TestFunction& u, const ModulatedMeasure& m, const QuadratureConfig& cfg) {
  return form_direct(u, u, m, cfg);
}

FormValue spectral_naive(const TestFunction& u, const ExponentSpec& e, double rel_tol) {
  if (e.measure.a.dim() != 1) throw Error(ErrorKind::UnsupportedDimension, "spectral form is implemented for d = 1");
  FormValue out;
  out.method = FormMethod::Spectral;
  if (u.is_zero()) return out;
  const double span = u.support_hi() - u.support_lo();
  const double panel = 2.0 * std::numbers::pi / span;
  const double S = u.fourier_decay_constant();
  double psi_rel = 0.0;
  bool psi_converged = true;
  auto f = [&](double xi) {
    const auto p = psi(e, xi);
    if (p.value > 0.0) psi_rel = std::max(psi_rel, p.error / p.value);
    psi_converged = psi_converged && p.converged;
    return std::norm(u.fourier(xi)) * p.value;
  };
  QuadratureConfig cfg;
  cfg.rel_tol = 0.1 * rel_tol;
  cfg.abs_tol = 1e-14;
  double lo = 0.0;
  double X = 16.0 * panel;
  // Past this cutoff the tail bound is reported as error instead of refined further.
  const double max_x = 1024.0 * panel;
  double integral = 0.0;
  double error = 0.0;
  bool converged = true;
  const std::vector<double> origin = {0.0};
  for (int round = 0; round < 12; ++round) {
    std::vector<double> breaks;
    for (double b = lo + panel; b < X; b += panel) breaks.push_back(b);
    const auto piece = integrate_singular(f, lo, X, lo == 0.0 ? std::span<const double>(origin) : std::span<const double>(),
                                          cfg, breaks);
    integral += partial_value(piece);
    error += piece.error();
    converged = converged && piece.converged();
    // |F u| <= S / xi^2, and psi grows no faster than xi^kappa past X, kappa read off
    // from the last octave (at most 2 by the doubling bound).
    double M = 0.0;
    for (int j = 0; j <= 8; ++j) M = std::max(M, psi(e, 0.5 * X * (1.0 + j / 8.0)).value);
    const double growth = std::log2(psi(e, X).value / psi(e, 0.5 * X).value);
    const double kappa = std::clamp(growth + 0.1, 0.1, 2.0);
    const double tail = 1.05 * M * S * S / ((3.0 - kappa) * X * X * X);
    const double target = 0.5 * rel_tol * integral;
    if (tail <= target) {
      error += tail;
      break;
    }
    if (round == 11 || X >= max_x) {
      error += tail;
      converged = false;
      break;
    }
    const double grow = std::pow(1.25 * tail / target, 1.0 / (3.0 - kappa));
    lo = X;
    X = std::min(max_x, X * std::clamp(grow, 1.25, 4.0));
  }
  error += psi_rel * integral;
  const double norm = 2.0 / (4.0 * std::numbers::pi * std::numbers::pi);
  out.value = norm * integral;
  out.error = norm * error;
  out.converged = converged && psi_converged;
  return out;
}

const SpectralCalibration& spectral_calibration() {
  static const SpectralCalibration cal = [] {
    const auto u = TestFunction::tent(0.0, 1.0);
    const ModulatedMeasure m(PeriodicCoefficient::constant(1.0), LevyDensity::stable_like(1.0), 1.0);
    SpectralCalibration c;
    c.direct = form_direct(u, m).value;
    c.naive = spectral_naive(u, ExponentSpec(m), 1e-5).value;
    const double ratio = c.direct / c.naive;
    const double two_pi = 2.0 * std::numbers::pi;
    const std::vector<std::pair<double, const char*>> candidates = {
        {1.0, "1"}, {two_pi, "(2pi)^d"}, {2.0, "2"}, {2.0 * two_pi, "2(2pi)^d"}};
    for (const auto& [k, label] : candidates) {
      if (std::abs(ratio - k) <= 1e-4 * k) {
        c.constant = k;
        c.label = label;
        return c;
      }
    }
    throw Error(ErrorKind::NormalizationMismatch,
                "direct/spectral ratio " + format_double(ratio) + " matches no normalization candidate");
  }();
  return cal;
}

FormValue form_spectral(const TestFunction& u, const ExponentSpec& e, double rel_tol) {
  const double k = spectral_calibration().constant;
  FormValue v = spectral_naive(u, e, rel_tol);
  v.value *= k;
  v.error *= k;
  return v;
}

namespace {

struct WeightedIntegral {
  double value = 0.0;
  double error = 0.0;
};

// Integral over [lo, hi] of g(x) a(x / delta) (or g alone when delta == 0).
WeightedIntegral integrate_against(const std::function<double(double)>& g, const std::vector<double>& gbreaks,
                                   double lo, double hi, const PeriodicCoefficient& a, double delta,
                                   const QuadratureConfig& cfg) {
  std::vector<double> sing;
  std::vector<double> brk = gbreaks;
  if (delta > 0.0) {
    sing = a.singular_points_scaled(delta, lo, hi);
    const auto ab = a.breakpoints_scaled(delta, lo, hi);
    brk.insert(brk.end(), ab.begin(), ab.end());
  }
  auto f = [&](double s, double t) {
    const double w = delta > 0.0 ? a.density_local(s / delta, t / delta) : 1.0;
    return w == 0.0 ? 0.0 : g(s + t) * w;
  };
  const auto o = require_finite(integrate_singular_local(f, lo, hi, sing, cfg, brk), "weighted integral");
  return {partial_value(o), o.error()};
}

ConvergenceReport weighted_convergence(const std::string& check, const std::function<double(double)>& g,
                                       const std::vector<double>& gbreaks, double lo, double hi,
                                       const PeriodicCoefficient& a, const std::vector<double>& deltas,
                                       double tolerance, const QuadratureConfig& cfg) {
  if (a.dim() != 1) throw Error(ErrorKind::UnsupportedDimension, "weak convergence checks are 1-d");
  if (deltas.empty()) throw Error(ErrorKind::Validation, "delta sequence must be nonempty");
  ConvergenceReport rep;
  rep.check = check;
  rep.tolerance = tolerance;
  rep.monotone_deltas = strictly_decreasing(deltas);
  if (!rep.monotone_deltas) throw Error(ErrorKind::Validation, "delta sequence must be strictly decreasing");
  const double abar = mean_value(a, cfg);
  const auto base = integrate_against(g, gbreaks, lo, hi, a, 0.0, cfg);
  const double limit = abar * base.value;
  rep.rows.resize(deltas.size());
  parallel_for(deltas.size(), [&](std::size_t i) {
    const auto w = integrate_against(g, gbreaks, lo, hi, a, deltas[i], cfg);
    ConvergenceRow& row = rep.rows[i];
    row.delta = deltas[i];
    row.value = w.value;
    row.limit = limit;
    row.abs_err = std::abs(w.value - limit);
    row.rel_err = limit != 0.0 ? row.abs_err / std::abs(limit) : row.abs_err;
    row.error_estimate = w.error + abar * base.error + std::abs(limit) * cfg.rel_tol;
    row.method = "direct";
  });
  rep.final_error = rep.rows.back().abs_err;
  rep.passed = rep.final_error <= tolerance;
  return rep;
}

}  // namespace

ConvergenceReport vague_convergence_check(const TestFunction& g, const PeriodicCoefficient& a,
                                          const std::vector<double>& deltas, double tolerance,
                                          const QuadratureConfig& cfg) {
  if (g.is_zero()) throw Error(ErrorKind::Validation, "test function must be nonzero");
  return weighted_convergence("vague", [&g](double x) { return g(x); }, g.kinks(), g.support_lo(), g.support_hi(), a,
                              deltas, tolerance, cfg);
}

ConvergenceReport weak_lp_check(const KernelFunction& g, double k_lo, double k_hi, const PeriodicCoefficient& a,
                                double p, const std::vector<double>& deltas, double tolerance,
                                const QuadratureConfig& cfg) {
  if (!(p > 1.0) || !(p < a.p_max())) {
    throw Error(ErrorKind::ExponentOutOfRange,
                "p = " + format_double(p) + " must satisfy 1 < p < p_max = " + format_double(a.p_max()));
  }
  if (!(k_lo < k_hi)) throw Error(ErrorKind::Validation, "K must be a nonempty interval");
  return weighted_convergence("weak_lp", g.f, g.breakpoints, k_lo, k_hi, a, deltas, tolerance, cfg);
}

LpBoundReport lp_bound_check(const PeriodicCoefficient& a, double p, int n, const std::vector<double>& deltas,
                             const QuadratureConfig& cfg) {
  if (!(p >= 1.0) || !(p < a.p_max())) {
    throw Error(ErrorKind::ExponentOutOfRange, "p must satisfy 1 <= p < p_max");
  }
  if (n < 1) throw Error(ErrorKind::Validation, "N must be a positive integer");
  const auto cell = power_integral(a, p, cfg);
  const double rhs = 2.0 * (n + 1) * cell.value();
  const double rhs_err = 2.0 * (n + 1) * cell.error();
  LpBoundReport rep;
  for (double delta : deltas) {
    if (!(delta > 0.0 && delta < 1.0)) continue;
    auto g = [p](double) { return 1.0; };
    std::vector<double> sing = a.singular_points_scaled(delta, -n, n);
    std::vector<double> brk = a.breakpoints_scaled(delta, -n, n);
    auto f = [&](double s, double t) {
      const double w = a.density_local(s / delta, t / delta);
      return w == 0.0 ? 0.0 : std::pow(w, p) * g(s + t);
    };
    const auto o = require_finite(integrate_singular_local(f, -n, n, sing, cfg, brk), "lp bound");
    LpBoundRow row;
    row.delta = delta;
    row.lhs = o.value();
    row.rhs = rhs;
    row.holds = row.lhs <= rhs + rhs_err + o.error();
    if (!row.holds) ++rep.violations;
    rep.rows.push_back(row);
  }
  rep.passed = rep.violations == 0;
  return rep;
}

namespace {

// Integral over |x| <= x_max, r_lo <= |z| <= r_hi of g(x, x - z) a(z / delta) (a = 1 when delta == 0).
WeightedIntegral band_integral(const BandFunction& g, double x_max, double r_lo, double r_hi,
                               const PeriodicCoefficient& a, double delta, const QuadratureConfig& cfg) {
  QuadratureConfig inner_cfg = cfg;
  inner_cfg.rel_tol = std::max(1e-10, 0.1 * cfg.rel_tol);
  auto inner = [&](double z) {
    const auto o = integrate_smooth([&](double x) { return g.g(x, x - z); }, -x_max, x_max, inner_cfg,
                                    std::vector<double>{-1.0 + z, z, 1.0 + z, -1.0, 0.0, 1.0});
    return partial_value(o);
  };
  WeightedIntegral total;
  for (double sign : {-1.0, 1.0}) {
    const double lo = sign > 0 ? r_lo : -r_hi;
    const double hi = sign > 0 ? r_hi : -r_lo;
    std::vector<double> sing;
    std::vector<double> brk;
    if (delta > 0.0) {
      sing = a.singular_points_scaled(delta, lo, hi);
      brk = a.breakpoints_scaled(delta, lo, hi);
    }
    auto f = [&](double s, double t) {
      const double w = delta > 0.0 ? a.density_local((sign > 0 ? s : -s) / delta, (sign > 0 ? t : -t) / delta) : 1.0;
      return w == 0.0 ? 0.0 : inner(s + t) * w;
    };
    const auto o = require_finite(integrate_singular_local(f, lo, hi, sing, cfg, brk), "band integral");
    total.value += partial_value(o);
    total.error += o.error();
  }
  return total;
}

}  // namespace

ConvergenceReport corollary2_check(const std::vector<BandFunction>& g_sequence, const BandFunction& g_limit,
                                   double x_max, double r_lo, double r_hi, const PeriodicCoefficient& a,
                                   const std::vector<double>& deltas, double tolerance,
                                   const QuadratureConfig& cfg) {
  if (g_sequence.size() != deltas.size()) throw Error(ErrorKind::Validation, "one g_n per delta_n is required");
  if (!(0.0 < r_lo && r_lo < r_hi) || !(x_max > 0.0)) throw Error(ErrorKind::Validation, "band must avoid the diagonal");
  ConvergenceReport rep;
  rep.check = "corollary2";
  rep.tolerance = tolerance;
  rep.monotone_deltas = strictly_decreasing(deltas);
  if (!rep.monotone_deltas) throw Error(ErrorKind::Validation, "delta sequence must be strictly decreasing");
  const double abar = mean_value(a, cfg);
  const auto base = band_integral(g_limit, x_max, r_lo, r_hi, a, 0.0, cfg);
  const double limit = abar * base.value;
  rep.rows.resize(deltas.size());
  parallel_for(deltas.size(), [&](std::size_t i) {
    const auto w = band_integral(g_sequence[i], x_max, r_lo, r_hi, a, deltas[i], cfg);
    ConvergenceRow& row = rep.rows[i];
    row.delta = deltas[i];
    row.value = w.value;
    row.limit = limit;
    row.abs_err = std::abs(w.value - limit);
    row.rel_err = limit != 0.0 ? row.abs_err / std::abs(limit) : row.abs_err;
    row.error_estimate = w.error + abar * base.error;
    row.method = "direct";
  });
  rep.final_error = rep.rows.back().abs_err;
  rep.passed = rep.final_error <= tolerance;
  return rep;
}

namespace {

void require_levy(const ModulatedMeasure& m, const QuadratureConfig& cfg) {
  const auto rep = check_levy_integrability(m, cfg);
  if (!rep.levy()) {
    throw Error(ErrorKind::NotLevyMeasure, "delta = " + format_double(m.delta) + " fails the Levy check (" +
                                               to_string(rep.verdict) + ")");
  }
}

double homogenized_energy(const TestFunction& u, const PeriodicCoefficient& a, const LevyDensity& nu,
                          const QuadratureConfig& cfg, double& error) {
  const double abar = mean_value(a, cfg);
  const auto e = form_direct(u, ModulatedMeasure(PeriodicCoefficient::constant(1.0), nu, 1.0), cfg);
  error = abar * e.error;
  return abar * e.value;
}

}  // namespace

ConvergenceReport mosco_m2_check(const TestFunction& u, const PeriodicCoefficient& a, const LevyDensity& nu,
                                 const std::vector<double>& deltas, double tolerance, const QuadratureConfig& cfg) {
  if (deltas.empty()) throw Error(ErrorKind::Validation, "delta sequence must be nonempty");
  ConvergenceReport rep;
  rep.check = "mosco_m2";
  rep.tolerance = tolerance;
  rep.monotone_deltas = strictly_decreasing(deltas);
  if (!rep.monotone_deltas) throw Error(ErrorKind::Validation, "delta sequence must be strictly decreasing");
  for (double d : deltas) require_levy(ModulatedMeasure(a, nu, d), cfg);
  double limit_err = 0.0;
  const double limit = homogenized_energy(u, a, nu, cfg, limit_err);
  rep.rows.resize(deltas.size());
  parallel_for(deltas.size(), [&](std::size_t i) {
    const auto e = form_direct(u, ModulatedMeasure(a, nu, deltas[i]), cfg);
    ConvergenceRow& row = rep.rows[i];
    row.delta = deltas[i];
    row.value = e.value;
    row.limit = limit;
    row.abs_err = std::abs(e.value - limit);
    row.rel_err = limit > 0.0 ? row.abs_err / limit : row.abs_err;
    row.error_estimate = e.error + limit_err;
    row.method = "direct";
  });
  rep.final_error = rep.rows.back().rel_err;
  rep.passed = rep.final_error <= tolerance;
  return rep;
}

std::vector<M1Family> m1_catalog(const TestFunction& u) {
  std::vector<M1Family> out;
  out.push_back({"constant", [u](int) { return u; }, u});
  out.push_back({"shrinking_bump",
                 [u](int n) { return u + TestFunction::tent(0.0, 1.0 / n).scaled(1.0 / std::sqrt(double(n))); }, u});
  out.push_back({"escaping_tent", [](int n) { return TestFunction::tent(double(n), 1.0); }, TestFunction::zero()});
  return out;
}

M1Report m1_necessary_check(const std::vector<M1Family>& families, const PeriodicCoefficient& a,
                            const LevyDensity& nu, const std::vector<double>& deltas, double tolerance,
                            const QuadratureConfig& cfg) {
  if (deltas.size() < 2) throw Error(ErrorKind::Validation, "need at least two deltas");
  if (!strictly_decreasing(deltas)) throw Error(ErrorKind::Validation, "delta sequence must be strictly decreasing");
  for (double d : deltas) require_levy(ModulatedMeasure(a, nu, d), cfg);
  M1Report rep;
  rep.entries.resize(families.size());
  const std::size_t n = deltas.size();
  std::vector<double> energies(families.size() * n);
  parallel_for(energies.size(), [&](std::size_t k) {
    const std::size_t f = k / n;
    const std::size_t i = k % n;
    const auto un = families[f].u_n(static_cast<int>(i) + 1);
    energies[k] = form_direct(un, ModulatedMeasure(a, nu, deltas[i]), cfg).value;
  });
  for (std::size_t f = 0; f < families.size(); ++f) {
    M1Entry& e = rep.entries[f];
    e.family = families[f].name;
    e.energies.assign(energies.begin() + f * n, energies.begin() + (f + 1) * n);
    double err = 0.0;
    e.target = families[f].limit.is_zero() ? 0.0 : homogenized_energy(families[f].limit, a, nu, cfg, err);
    e.tail_min = *std::min_element(e.energies.begin() + n / 2, e.energies.end());
    e.holds = e.tail_min >= e.target - tolerance * std::max(1.0, e.target);
    if (!e.holds) ++rep.violations;
  }
  rep.passed = rep.violations == 0;
  return rep;
}

}  // namespace homog

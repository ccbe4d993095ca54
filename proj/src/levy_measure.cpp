#include "homog/levy_measure.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace homog {

const char* to_string(DensityKind kind) {
  switch (kind) {
    case DensityKind::StableLike: return "stable";
    case DensityKind::Example1ii: return "example1ii";
    case DensityKind::TruncatedStable: return "truncated_stable";
  }
  return "unknown";
}

const char* to_string(LevyVerdict v) {
  switch (v) {
    case LevyVerdict::LevyMeasure: return "levy_measure";
    case LevyVerdict::NotLevyMeasure: return "not_levy_measure";
    case LevyVerdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 2.0)) throw Error(ErrorKind::Validation, "beta must lie in (0, 2)");
}

}  // namespace

LevyDensity LevyDensity::stable_like(double beta, int dim) {
  check_beta(beta);
  if (dim < 1) throw Error(ErrorKind::UnsupportedDimension, "dim must be >= 1");
  LevyDensity nu;
  nu.kind_ = DensityKind::StableLike;
  nu.beta_ = beta;
  nu.dim_ = dim;
  return nu;
}

LevyDensity LevyDensity::example1ii(double beta, double gamma) {
  check_beta(beta);
  LevyDensity nu;
  nu.kind_ = DensityKind::Example1ii;
  nu.beta_ = beta;
  nu.gamma_ = gamma;
  nu.b_ = shifted_coefficient(PeriodicCoefficient::example1(gamma), 0.5);
  return nu;
}

LevyDensity LevyDensity::truncated_stable(double beta, double radius) {
  check_beta(beta);
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorKind::Validation, "truncation radius must be positive and finite");
  }
  LevyDensity nu;
  nu.kind_ = DensityKind::TruncatedStable;
  nu.beta_ = beta;
  nu.radius_ = radius;
  return nu;
}

double LevyDensity::radial(double h) const {
  const double r = std::abs(h);
  if (kind_ == DensityKind::TruncatedStable && r > radius_) return 0.0;
  return std::pow(r, -1.0 - beta_);
}

std::optional<double> LevyDensity::operator()(double h) const {
  if (h == 0.0) throw Error(ErrorKind::Domain, "Levy density evaluated at the origin");
  if (dim_ != 1) throw Error(ErrorKind::UnsupportedDimension, "scalar evaluation of a multi-dimensional density");
  const double base = radial(h);
  if (!b_) return base;
  // b is even, so b(|h|) keeps nu symmetric bit for bit.
  const auto bv = (*b_)(std::abs(h));
  if (!bv) return std::nullopt;
  return *bv * base;
}

std::optional<double> LevyDensity::operator()(const Eigen::Ref<const Eigen::VectorXd>& h) const {
  if (h.size() != dim_) throw Error(ErrorKind::UnsupportedDimension, "point dimension mismatch");
  if (dim_ == 1) return (*this)(h[0]);
  const double r = h.norm();
  if (r == 0.0) throw Error(ErrorKind::Domain, "Levy density evaluated at the origin");
  return std::pow(r, -static_cast<double>(dim_) - beta_);
}

std::string LevyDensity::describe() const {
  char buf[128];
  switch (kind_) {
    case DensityKind::StableLike: std::snprintf(buf, sizeof buf, "stable(beta=%g, d=%d)", beta_, dim_); break;
    case DensityKind::Example1ii:
      std::snprintf(buf, sizeof buf, "example1ii(beta=%g, gamma=%g)", beta_, gamma_);
      break;
    case DensityKind::TruncatedStable:
      std::snprintf(buf, sizeof buf, "truncated_stable(beta=%g, R=%g)", beta_, radius_);
      break;
  }
  return buf;
}

ModulatedMeasure::ModulatedMeasure(PeriodicCoefficient a_, LevyDensity nu_, double delta_)
    : a(std::move(a_)), nu(std::move(nu_)), delta(delta_) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(ErrorKind::Validation, "delta must be positive");
  if (a.dim() != nu.dim()) throw Error(ErrorKind::UnsupportedDimension, "coefficient and density dimensions differ");
}

double ModulatedMeasure::integrand(double h) const {
  const double x = std::abs(h);
  double v = nu.radial(x);
  if (v == 0.0) return 0.0;
  v *= a.density((a.even() ? x : h) / delta);
  if (const auto& b = nu.periodic_factor()) v *= b->density(x);
  return v;
}

double ModulatedMeasure::periodic_local(double anchor, double t) const {
  if (anchor + t < 0.0 && a.even()) {
    anchor = -anchor;
    t = -t;
  }
  double v = a.density_local(anchor / delta, t / delta);
  if (const auto& b = nu.periodic_factor()) v *= b->density_local(std::abs(anchor), anchor < 0.0 ? -t : t);
  return v;
}

double ModulatedMeasure::integrand_local(double anchor, double t) const {
  const double r = nu.radial(std::abs(anchor + t));
  return r == 0.0 ? 0.0 : r * periodic_local(anchor, t);
}

std::vector<double> ModulatedMeasure::singular_points(double lo, double hi) const {
  std::vector<double> pts = a.singular_points_scaled(delta, lo, hi);
  if (const auto& b = nu.periodic_factor()) {
    auto bp = b->singular_points_scaled(1.0, lo, hi);
    pts.insert(pts.end(), bp.begin(), bp.end());
  }
  if (lo <= 0.0 && hi >= 0.0) pts.push_back(0.0);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::vector<double> ModulatedMeasure::breakpoints(double lo, double hi) const {
  std::vector<double> pts = a.breakpoints_scaled(delta, lo, hi);
  if (const auto& b = nu.periodic_factor()) {
    auto bp = b->breakpoints_scaled(1.0, lo, hi);
    pts.insert(pts.end(), bp.begin(), bp.end());
  }
  if (nu.kind() == DensityKind::TruncatedStable) {
    for (double r : {-nu.radius(), nu.radius()}) {
      if (r > lo && r < hi) pts.push_back(r);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double ModulatedMeasure::support_radius() const {
  return nu.kind() == DensityKind::TruncatedStable ? nu.radius() : std::numeric_limits<double>::infinity();
}

std::optional<double> modulated_density(const ModulatedMeasure& m, double h) {
  if (h == 0.0) throw Error(ErrorKind::Domain, "modulated density is undefined at h = 0");
  if (m.a.dim() != 1) throw Error(ErrorKind::UnsupportedDimension, "modulated_density is 1-d");
  const auto nv = m.nu(h);
  const auto av = m.a((m.a.even() ? std::abs(h) : h) / m.delta);
  if (!nv || !av) return std::nullopt;
  return *av * *nv;
}

double joint_period(const ModulatedMeasure& m) {
  const bool a_periodic = m.a.kind() != CoefficientKind::Constant;
  const bool b_periodic = m.nu.periodic_factor().has_value();
  if (!a_periodic && !b_periodic) return 0.0;
  if (!b_periodic) return m.delta;
  if (!a_periodic) return 1.0;
  for (int k = 1; k <= 1000; ++k) {
    const double kd = k * m.delta;
    const double n = std::round(kd);
    if (n >= 1.0 && std::abs(kd - n) <= 1e-12 * n) return n;
  }
  throw Error(ErrorKind::UnsupportedDensity,
              "scale delta is not commensurate with the unit period of the density factor");
}

QuadratureOutcome tail_mass(const ModulatedMeasure& m, double from, const QuadratureConfig& cfg) {
  if (!(from > 0.0)) throw Error(ErrorKind::Domain, "tail_mass starts at a positive radius");
  if (m.a.dim() != 1) throw Error(ErrorKind::UnsupportedDimension, "tail_mass is 1-d");
  const double beta = m.nu.beta();
  if (m.nu.kind() == DensityKind::TruncatedStable) {
    const double R = m.nu.radius();
    if (from >= R) return QuadratureOutcome{};
    return integrate_singular_local([&m](double s, double t) { return m.integrand_local(s, t); }, from, R,
                                    m.singular_points(from, R), cfg, m.breakpoints(from, R));
  }
  const double period = joint_period(m);
  if (period == 0.0) {
    const double c = m.a.constant_value();
    QuadratureOutcome out;
    out.verdict = Converged{c * std::pow(from, -beta) / beta, 0.0};
    return out;
  }
  const double hi = from + period;
  const double scale = std::pow(period, -1.0 - beta);
  // Periodic factor times the Hurwitz sum over all translates by the period.
  double zeta_err = 0.0;
  auto f = [&](double s, double t) {
    const double g = m.periodic_local(s, t);
    if (g == 0.0) return 0.0;
    const auto z = hurwitz_zeta(1.0 + beta, (s + t) / period);
    zeta_err = std::max(zeta_err, z.error / z.value);
    return g * scale * z.value;
  };
  auto out = integrate_singular_local(f, from, hi, m.singular_points(from, hi), cfg, m.breakpoints(from, hi));
  if (auto* c = std::get_if<Converged>(&out.verdict)) c->error += zeta_err * std::abs(c->value);
  return out;
}

IntegrabilityReport check_levy_integrability(const ModulatedMeasure& m, const QuadratureConfig& cfg) {
  if (m.a.dim() != 1) {
    throw Error(ErrorKind::UnsupportedDimension, "integrability checks are implemented for d = 1");
  }
  if (!m.a.even()) throw Error(ErrorKind::Validation, "coefficient must be even for a symmetric measure");
  IntegrabilityReport rep;
  const double hi = std::min(1.0, m.support_radius());
  auto near = integrate_singular_local(
      [&m](double s, double t) {
        const double h = s + t;
        return h * h * m.integrand_local(s, t);
      },
      0.0, hi, m.singular_points(0.0, hi), cfg, m.breakpoints(0.0, hi));
  rep.near_origin = scale(near, 2.0);
  rep.tail = scale(tail_mass(m, 1.0, cfg), 2.0);
  if (rep.near_origin.divergent()) {
    rep.verdict = LevyVerdict::NotLevyMeasure;
    rep.diverged_part = "near_origin";
  } else if (rep.tail.divergent()) {
    rep.verdict = LevyVerdict::NotLevyMeasure;
    rep.diverged_part = "tail";
  } else if (rep.near_origin.converged() && rep.tail.converged()) {
    rep.verdict = LevyVerdict::LevyMeasure;
    rep.value = rep.near_origin.value() + rep.tail.value();
  } else {
    rep.verdict = LevyVerdict::Inconclusive;
  }
  return rep;
}

std::string to_json_row(const IntegrabilityReport& r, double beta, double gamma, double delta) {
  char buf[320];
  auto num = [](double v) {
    char b[40];
    if (std::isfinite(v)) {
      std::snprintf(b, sizeof b, "%.17g", v);
    } else {
      std::snprintf(b, sizeof b, "null");
    }
    return std::string(b);
  };
  std::snprintf(buf, sizeof buf,
                "{\"beta\": %s, \"gamma\": %s, \"delta\": %s, \"verdict\": \"%s\", \"value\": %s, "
                "\"near_origin_error\": %s, \"tail_error\": %s}",
                num(beta).c_str(), num(gamma).c_str(), num(delta).c_str(), to_string(r.verdict),
                r.levy() ? num(r.value).c_str() : "null", num(r.near_origin.error()).c_str(),
                num(r.tail.error()).c_str());
  return buf;
}

Example1Constants example1_constants(double gamma, double beta, const QuadratureConfig& cfg) {
  if (!(gamma > 0.0 && gamma < std::min(1.0, 2.0 - beta))) {
    throw Error(ErrorKind::Validation, "example1_constants requires 0 < gamma < min(1, 2 - beta)");
  }
  const ModulatedMeasure m(PeriodicCoefficient::example1(gamma), LevyDensity::example1ii(beta, gamma), 1.0);
  const auto& b = *m.nu.periodic_factor();
  Example1Constants out;
  const std::array<double, 5> cuts = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int i = 0; i < 4; ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    const auto sing = m.singular_points(lo, hi);
    const auto cg = integrate_singular_local(
        [&m](double s, double t) {
          const double h = s + t;
          return h * h * m.integrand_local(s, t);
        },
        lo, hi, sing, cfg);
    const auto cc = integrate_singular_local(
        [&m, &b](double s, double t) { return m.a.density_local(s, t) * b.density_local(s, t); }, lo, hi, sing,
        cfg);
    out.c_gamma_pieces[i] = cg.value();
    out.c_pieces[i] = cc.value();
    out.c_gamma += out.c_gamma_pieces[i];
    out.c += out.c_pieces[i];
    out.error += cg.error() + cc.error();
  }
  // Both halves of (1 ^ h^2) a nu contribute, hence the factor 2 on the series term too.
  const auto series = periodic_tail_sum(out.c, beta, 1, cfg);
  out.levy_bound = 2.0 * out.c_gamma + 2.0 * series.value;
  return out;
}

}  // namespace homog

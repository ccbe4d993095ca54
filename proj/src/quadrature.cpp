#include "homog/quadrature.hpp"

#include <cstdio>
#include <numbers>

namespace homog {

void QuadratureConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw Error(ErrorKind::Validation, "quadrature tolerances must be positive");
  }
  if (max_refinements < 1) throw Error(ErrorKind::Validation, "max_refinements must be >= 1");
  if (!(grading_ratio > 0.0 && grading_ratio < 1.0)) {
    throw Error(ErrorKind::Validation, "grading_ratio must lie in (0, 1)");
  }
  if (max_subintervals < 1) throw Error(ErrorKind::Validation, "max_subintervals must be >= 1");
}

double QuadratureOutcome::value() const {
  if (const auto* c = std::get_if<Converged>(&verdict)) return c->value;
  throw Error(ErrorKind::QuadratureFailure, describe());
}

double QuadratureOutcome::error() const {
  if (const auto* c = std::get_if<Converged>(&verdict)) return c->error;
  if (const auto* i = std::get_if<Inconclusive>(&verdict)) return i->error;
  return std::numeric_limits<double>::infinity();
}

std::string QuadratureOutcome::describe() const {
  char buf[256];
  if (const auto* c = std::get_if<Converged>(&verdict)) {
    std::snprintf(buf, sizeof buf, "converged value=%.12g error=%.3g", c->value, c->error);
  } else if (const auto* d = std::get_if<Divergent>(&verdict)) {
    std::snprintf(buf, sizeof buf, "divergent growth_exponent=%.4g partial=%.6g",
                  d->growth_exponent, d->partial);
  } else {
    const auto& i = std::get<Inconclusive>(verdict);
    std::snprintf(buf, sizeof buf, "inconclusive partial=%.12g error=%.3g (%s)", i.partial,
                  i.error, i.reason.c_str());
  }
  return buf;
}

namespace {

double partial_of(const QuadratureOutcome& o) {
  if (const auto* c = std::get_if<Converged>(&o.verdict)) return c->value;
  if (const auto* d = std::get_if<Divergent>(&o.verdict)) return d->partial;
  return std::get<Inconclusive>(o.verdict).partial;
}

}  // namespace

QuadratureOutcome combine(const QuadratureOutcome& lhs, const QuadratureOutcome& rhs) {
  QuadratureOutcome out;
  out.evaluations = lhs.evaluations + rhs.evaluations;
  const double partial = partial_of(lhs) + partial_of(rhs);
  if (lhs.divergent() || rhs.divergent()) {
    const double g = std::max(lhs.divergent() ? std::get<Divergent>(lhs.verdict).growth_exponent : 0.0,
                              rhs.divergent() ? std::get<Divergent>(rhs.verdict).growth_exponent : 0.0);
    out.verdict = Divergent{g, partial};
  } else if (lhs.inconclusive() || rhs.inconclusive()) {
    std::string reason = lhs.inconclusive() ? std::get<Inconclusive>(lhs.verdict).reason
                                            : std::get<Inconclusive>(rhs.verdict).reason;
    out.verdict = Inconclusive{partial, lhs.error() + rhs.error(), reason};
  } else {
    out.verdict = Converged{partial, lhs.error() + rhs.error()};
  }
  return out;
}

QuadratureOutcome scale(const QuadratureOutcome& o, double factor) {
  QuadratureOutcome out = o;
  if (auto* c = std::get_if<Converged>(&out.verdict)) {
    c->value *= factor;
    c->error *= std::abs(factor);
  } else if (auto* d = std::get_if<Divergent>(&out.verdict)) {
    d->partial *= factor;
  } else {
    auto& i = std::get<Inconclusive>(out.verdict);
    i.partial *= factor;
    i.error *= std::abs(factor);
  }
  return out;
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

QuadratureOutcome smooth_piece(const LocalIntegrand& f, double a, double b, double rel, double abs,
                               const QuadratureConfig& cfg) {
  auto r = adaptive_gauss_kronrod<double>([&](double t) { return f(a, t); }, 0.0, b - a, abs, rel,
                                          cfg.max_subintervals);
  QuadratureOutcome out;
  out.evaluations = r.evaluations;
  if (!std::isfinite(r.value)) {
    out.verdict = Inconclusive{r.value, r.error, "non-finite integrand on a regular piece"};
  } else if (r.converged) {
    out.verdict = Converged{r.value, r.error};
  } else {
    out.verdict = Inconclusive{r.value, r.error, "subinterval budget exhausted"};
  }
  return out;
}

// Graded shells from the far end `e` toward the singular point `s`.
QuadratureOutcome graded_piece(const LocalIntegrand& f, double s, double e, double rel, double abs,
                               const QuadratureConfig& cfg, bool exact_offsets) {
  const double w = e - s;
  const double ratio = cfg.grading_ratio;
  const double floor_width =
      exact_offsets ? 1e-280 : 64.0 * kEps * std::max({std::abs(s), std::abs(e), 1e-300});
  double partial = 0.0;
  double err = 0.0;
  std::size_t evals = 0;
  std::vector<double> increments;
  std::vector<double> ratios;
  double prev_estimate = std::numeric_limits<double>::quiet_NaN();
  double scale_k = 1.0;
  QuadratureOutcome out;
  for (int k = 0; k < cfg.max_refinements; ++k) {
    const double outer = w * scale_k;
    const double inner = w * scale_k * ratio;
    scale_k *= ratio;
    if (std::abs(outer - inner) <= floor_width) break;
    const double lo = std::min(inner, outer);
    const double hi = std::max(inner, outer);
    auto r = adaptive_gauss_kronrod<double>([&](double t) { return f(s, t); }, lo, hi, 1e-3 * abs, 0.1 * rel,
                                            cfg.max_subintervals);
    evals += r.evaluations;
    if (!std::isfinite(r.value)) break;
    const double inc = r.value;
    partial += inc;
    err += r.error;
    increments.push_back(inc);
    if (std::abs(partial) > cfg.divergence_cap) {
      const double q = ratios.empty() ? 1.0 : ratios.back();
      out.evaluations = evals;
      out.verdict = Divergent{std::log(std::max(q, 1.0)) / std::log(1.0 / ratio), partial};
      return out;
    }
    if (increments.size() >= 2) {
      const double before = increments[increments.size() - 2];
      if (before == 0.0 && inc == 0.0) {
        out.evaluations = evals;
        out.verdict = Converged{partial, err};
        return out;
      }
      if (before != 0.0) ratios.push_back(std::abs(inc / before));
    }
    const std::size_t nr = ratios.size();
    if (nr >= 2) {
      const double q = ratios[nr - 1];
      if (q < 0.99) {
        const double estimate = partial + inc * q / (1.0 - q);
        if (std::isfinite(prev_estimate)) {
          const double tail_err = std::abs(estimate - prev_estimate);
          if (tail_err + err <= std::max(rel * std::abs(estimate), abs)) {
            out.evaluations = evals;
            out.verdict = Converged{estimate, tail_err + err};
            return out;
          }
        }
        prev_estimate = estimate;
      } else {
        prev_estimate = std::numeric_limits<double>::quiet_NaN();
      }
    }
    if (nr >= 6) {
      const auto last = std::span<const double>(ratios).last(6);
      const auto [mn, mx] = std::minmax_element(last.begin(), last.end());
      double mean = 0.0;
      for (double q : last) mean += q / 6.0;
      if (*mn >= 0.9995 && (*mx - *mn) <= 0.02 * mean) {
        out.evaluations = evals;
        out.verdict = Divergent{std::max(0.0, std::log(mean) / std::log(1.0 / ratio)), partial};
        return out;
      }
    }
  }
  out.evaluations = evals;
  out.verdict = Inconclusive{partial, err, "shell budget exhausted near singular point"};
  return out;
}

struct Point {
  double x;
  bool singular;
};

std::vector<Point> collect_points(double lo, double hi, std::span<const double> singular,
                                  std::span<const double> breaks) {
  std::vector<Point> pts;
  pts.push_back({lo, false});
  pts.push_back({hi, false});
  for (double s : singular) {
    if (s >= lo && s <= hi) pts.push_back({s, true});
  }
  for (double b : breaks) {
    if (b > lo && b < hi) pts.push_back({b, false});
  }
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
  std::vector<Point> merged;
  const double tol = 4.0 * kEps * std::max(std::abs(lo), std::abs(hi));
  for (const auto& p : pts) {
    if (!merged.empty() && p.x - merged.back().x <= tol) {
      merged.back().singular = merged.back().singular || p.singular;
      continue;
    }
    merged.push_back(p);
  }
  // Endpoints keep their exact values even after merging.
  merged.front().x = lo;
  merged.back().x = hi;
  return merged;
}

QuadratureOutcome integrate_points(const LocalIntegrand& f, const std::vector<Point>& pts,
                                   const QuadratureConfig& cfg, bool exact_offsets) {
  const std::size_t segments = pts.size() - 1;
  const double rel = 0.5 * cfg.rel_tol;
  const double abs = cfg.abs_tol / static_cast<double>(std::max<std::size_t>(segments, 1));
  QuadratureOutcome total;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Point& a = pts[i];
    const Point& b = pts[i + 1];
    QuadratureOutcome piece;
    if (!a.singular && !b.singular) {
      piece = smooth_piece(f, a.x, b.x, rel, abs, cfg);
    } else if (a.singular && b.singular) {
      const double mid = 0.5 * (a.x + b.x);
      piece = combine(graded_piece(f, a.x, mid, rel, 0.5 * abs, cfg, exact_offsets),
                      graded_piece(f, b.x, mid, rel, 0.5 * abs, cfg, exact_offsets));
    } else if (a.singular) {
      piece = graded_piece(f, a.x, b.x, rel, abs, cfg, exact_offsets);
    } else {
      piece = graded_piece(f, b.x, a.x, rel, abs, cfg, exact_offsets);
    }
    total = combine(total, piece);
  }
  if (auto* c = std::get_if<Converged>(&total.verdict)) {
    if (c->error > std::max(cfg.rel_tol * std::abs(c->value), cfg.abs_tol)) {
      total.verdict = Inconclusive{c->value, c->error, "combined error above tolerance"};
    }
  }
  return total;
}

}  // namespace

QuadratureOutcome integrate_singular(const Integrand& f, double lo, double hi,
                                     std::span<const double> singular_points,
                                     const QuadratureConfig& cfg,
                                     std::span<const double> breakpoints) {
  cfg.validate();
  if (!(lo < hi)) throw Error(ErrorKind::Domain, "integration interval must satisfy lo < hi");
  const LocalIntegrand g = [&f](double anchor, double t) { return f(anchor + t); };
  return integrate_points(g, collect_points(lo, hi, singular_points, breakpoints), cfg, false);
}

QuadratureOutcome integrate_singular_local(const LocalIntegrand& f, double lo, double hi,
                                           std::span<const double> singular_points,
                                           const QuadratureConfig& cfg,
                                           std::span<const double> breakpoints) {
  cfg.validate();
  if (!(lo < hi)) throw Error(ErrorKind::Domain, "integration interval must satisfy lo < hi");
  return integrate_points(f, collect_points(lo, hi, singular_points, breakpoints), cfg, true);
}

QuadratureOutcome integrate_smooth(const Integrand& f, double lo, double hi,
                                   const QuadratureConfig& cfg,
                                   std::span<const double> breakpoints) {
  return integrate_singular(f, lo, hi, {}, cfg, breakpoints);
}

SeriesValue hurwitz_zeta(double s, double q) {
  if (!(s > 1.0) || !(q > 0.0)) {
    throw Error(ErrorKind::Domain, "hurwitz_zeta requires s > 1 and q > 0");
  }
  // Explicit terms until the shifted argument reaches 32, then
  // Euler-Maclaurin with three Bernoulli corrections.
  constexpr double kShift = 32.0;
  double sum = 0.0;
  double x = q;
  while (x < kShift) {
    sum += std::pow(x, -s);
    x += 1.0;
  }
  const double xs = std::pow(x, -s);
  double tail = x * xs / (s - 1.0) + 0.5 * xs;
  // B2/2!, B4/4!, B6/6!
  constexpr std::array<double, 3> kCoef = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0};
  double rising = s;  // s (s+1) ... (s + 2j - 2)
  double power = xs / x;
  for (int j = 0; j < 3; ++j) {
    tail += kCoef[j] * rising * power;
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    power /= x * x;
  }
  // Next term, B8/8! = -1/1209600, bounds the remainder.
  const double err = std::abs(rising * power / 1209600.0) + 4.0 * kEps * (sum + tail);
  return {sum + tail, err};
}

SeriesValue periodic_tail_sum(double period_integral, double beta, long start,
                              const QuadratureConfig& cfg) {
  cfg.validate();
  if (!(beta > 0.0)) throw Error(ErrorKind::Domain, "periodic_tail_sum requires beta > 0");
  if (!(period_integral >= 0.0)) {
    throw Error(ErrorKind::Domain, "periodic_tail_sum requires a nonnegative period integral");
  }
  if (start < 1) throw Error(ErrorKind::Domain, "periodic_tail_sum requires start >= 1");
  if (period_integral == 0.0) return {0.0, 0.0};
  const auto z = hurwitz_zeta(1.0 + beta, static_cast<double>(start));
  return {period_integral * z.value, period_integral * z.error};
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::Validation, "Gauss rule needs at least one node");
  GaussRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 2.0);
  if (n == 1) return rule;
  // Legendre P_n and its derivative at x by the three-term recurrence.
  auto legendre = [n](double x) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

double integrate_box(const std::function<double(const Eigen::VectorXd&)>& f,
                     const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int panels, int order) {
  const Eigen::Index d = lo.size();
  if (d < 1 || hi.size() != d) throw Error(ErrorKind::UnsupportedDimension, "box dimension mismatch");
  if (panels < 1) throw Error(ErrorKind::Validation, "integrate_box needs panels >= 1");
  const GaussRule rule = gauss_legendre(order);
  // One axis flattened into panels * order nodes.
  const int m = panels * order;
  std::vector<Eigen::VectorXd> nodes(d, Eigen::VectorXd(m));
  std::vector<Eigen::VectorXd> weights(d, Eigen::VectorXd(m));
  for (Eigen::Index ax = 0; ax < d; ++ax) {
    const double h = (hi[ax] - lo[ax]) / panels;
    for (int p = 0; p < panels; ++p) {
      const double c = lo[ax] + (p + 0.5) * h;
      for (int j = 0; j < order; ++j) {
        nodes[ax][p * order + j] = c + 0.5 * h * rule.nodes[j];
        weights[ax][p * order + j] = 0.5 * h * rule.weights[j];
      }
    }
  }
  std::vector<int> idx(d, 0);
  Eigen::VectorXd x(d);
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    for (Eigen::Index ax = 0; ax < d; ++ax) {
      x[ax] = nodes[ax][idx[ax]];
      w *= weights[ax][idx[ax]];
    }
    sum += w * f(x);
    Eigen::Index ax = 0;
    while (ax < d && ++idx[ax] == m) idx[ax++] = 0;
    if (ax == d) break;
  }
  return sum;
}

}  // namespace homog

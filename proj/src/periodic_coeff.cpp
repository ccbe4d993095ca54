#include "homog/periodic_coeff.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace homog {

const char* to_string(CoefficientKind kind) {
  switch (kind) {
    case CoefficientKind::Constant: return "constant";
    case CoefficientKind::SmoothCosine: return "smooth_cosine";
    case CoefficientKind::Example1: return "example1";
    case CoefficientKind::TensorProduct: return "tensor_product";
  }
  return "unknown";
}

PeriodicCoefficient PeriodicCoefficient::constant(double c, int dim) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorKind::Validation, "constant coefficient must be positive and finite");
  }
  if (dim < 1) throw Error(ErrorKind::UnsupportedDimension, "dim must be >= 1");
  PeriodicCoefficient a;
  a.kind_ = CoefficientKind::Constant;
  a.c_ = c;
  a.dim_ = dim;
  return a;
}

PeriodicCoefficient PeriodicCoefficient::smooth_cosine(double amplitude, double offset) {
  if (!std::isfinite(amplitude) || !std::isfinite(offset) || !(offset > std::abs(amplitude))) {
    throw Error(ErrorKind::Validation,
                "smooth_cosine needs offset > |amplitude| so that a > 0 everywhere");
  }
  PeriodicCoefficient a;
  a.kind_ = CoefficientKind::SmoothCosine;
  a.amplitude_ = amplitude;
  a.offset_ = offset;
  return a;
}

PeriodicCoefficient PeriodicCoefficient::example1(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorKind::Validation, "example1 requires 0 < gamma < 1");
  }
  PeriodicCoefficient a;
  a.kind_ = CoefficientKind::Example1;
  a.gamma_ = gamma;
  return a;
}

PeriodicCoefficient PeriodicCoefficient::tensor_product(std::vector<PeriodicCoefficient> factors) {
  if (factors.empty()) throw Error(ErrorKind::Validation, "tensor product needs a factor");
  PeriodicCoefficient a;
  a.kind_ = CoefficientKind::TensorProduct;
  for (auto& f : factors) {
    if (f.kind_ == CoefficientKind::TensorProduct) {
      for (auto& g : f.factors_) a.factors_.push_back(g);
    } else if (f.dim_ == 1) {
      a.factors_.push_back(std::move(f));
    } else {
      // Constant in dim k is the product of k unit-dimension constants.
      a.factors_.push_back(constant(f.c_, 1));
      for (int i = 1; i < f.dim_; ++i) a.factors_.push_back(constant(1.0, 1));
    }
  }
  a.dim_ = static_cast<int>(a.factors_.size());
  return a;
}

double PeriodicCoefficient::eval_unit(double t) const {
  switch (kind_) {
    case CoefficientKind::Constant: return c_;
    case CoefficientKind::SmoothCosine:
      return offset_ + amplitude_ * std::cos(2.0 * std::numbers::pi * t);
    case CoefficientKind::Example1:
      if (t <= 0.25) return std::pow(t, -gamma_);
      if (t <= 0.75) return std::pow(4.0, gamma_);
      return std::pow(1.0 - t, -gamma_);
    case CoefficientKind::TensorProduct: break;
  }
  throw Error(ErrorKind::InternalConsistency, "eval_unit on tensor product");
}

std::optional<double> PeriodicCoefficient::operator()(double x) const {
  if (kind_ == CoefficientKind::TensorProduct || dim_ != 1) {
    if (dim_ == 1) return factors_.front()(x);
    throw Error(ErrorKind::UnsupportedDimension, "scalar evaluation of a multi-dimensional coefficient");
  }
  if (kind_ == CoefficientKind::Constant) return c_;
  const double t = wrap_unit(wrap_unit(x) - shift_);
  if (kind_ == CoefficientKind::Example1 && t == 0.0) return std::nullopt;
  return eval_unit(t);
}

double PeriodicCoefficient::density_local(double anchor, double offset) const {
  if (kind_ == CoefficientKind::Constant) return c_;
  if (kind_ == CoefficientKind::TensorProduct) return factors_.front().density_local(anchor, offset);
  const double u = anchor - shift_;
  const double r = std::round(4.0 * u);
  if (std::abs(u - 0.25 * r) > 1e-9 * std::max(1.0, std::abs(u))) return density(anchor + offset);
  const double q = 0.25 * static_cast<double>(((static_cast<long long>(r) % 4) + 4) % 4);
  if (kind_ == CoefficientKind::Example1 && q == 0.0 && std::abs(offset) <= 0.25) {
    const double d = std::abs(offset);
    return d == 0.0 ? 0.0 : std::pow(d, -gamma_);
  }
  const double t = wrap_unit(q + offset);
  if (kind_ == CoefficientKind::Example1 && t == 0.0) return 0.0;
  return eval_unit(t);
}

std::optional<double> PeriodicCoefficient::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dim_) throw Error(ErrorKind::UnsupportedDimension, "point dimension mismatch");
  if (kind_ == CoefficientKind::Constant) return c_;
  if (kind_ != CoefficientKind::TensorProduct) return (*this)(x[0]);
  double v = 1.0;
  for (int i = 0; i < dim_; ++i) {
    const auto fi = factors_[i](x[i]);
    if (!fi) return std::nullopt;
    v *= *fi;
  }
  return v;
}

bool PeriodicCoefficient::bounded() const {
  if (kind_ == CoefficientKind::Example1) return false;
  if (kind_ == CoefficientKind::TensorProduct) {
    for (const auto& f : factors_) {
      if (!f.bounded()) return false;
    }
  }
  return true;
}

double PeriodicCoefficient::sup() const {
  switch (kind_) {
    case CoefficientKind::Constant: return c_;
    case CoefficientKind::SmoothCosine: return offset_ + std::abs(amplitude_);
    case CoefficientKind::Example1: return std::numeric_limits<double>::infinity();
    case CoefficientKind::TensorProduct: {
      double s = 1.0;
      for (const auto& f : factors_) s *= f.sup();
      return s;
    }
  }
  return std::numeric_limits<double>::infinity();
}

double PeriodicCoefficient::p_max() const {
  switch (kind_) {
    case CoefficientKind::Example1: return 1.0 / gamma_;
    case CoefficientKind::TensorProduct: {
      double p = std::numeric_limits<double>::infinity();
      for (const auto& f : factors_) p = std::min(p, f.p_max());
      return p;
    }
    default: return std::numeric_limits<double>::infinity();
  }
}

bool PeriodicCoefficient::even() const {
  if (kind_ == CoefficientKind::Constant) return true;
  if (kind_ == CoefficientKind::TensorProduct) {
    for (const auto& f : factors_) {
      if (!f.even()) return false;
    }
    return true;
  }
  return shift_ == 0.0 || shift_ == 0.5;
}

std::vector<double> PeriodicCoefficient::singular_points_in_q() const {
  if (dim_ != 1) throw Error(ErrorKind::UnsupportedDimension, "singular points are per axis");
  if (kind_ == CoefficientKind::TensorProduct) return factors_.front().singular_points_in_q();
  if (kind_ == CoefficientKind::Example1) return {shift_};
  return {};
}

std::vector<double> PeriodicCoefficient::breakpoints_in_q() const {
  if (dim_ != 1) throw Error(ErrorKind::UnsupportedDimension, "breakpoints are per axis");
  if (kind_ == CoefficientKind::TensorProduct) return factors_.front().breakpoints_in_q();
  std::vector<double> base;
  switch (kind_) {
    case CoefficientKind::Constant: return {};
    case CoefficientKind::SmoothCosine: base = {0.0, 0.5}; break;
    case CoefficientKind::Example1: base = {0.0, 0.25, 0.75}; break;
    default: break;
  }
  for (double& b : base) b = wrap_unit(b + shift_);
  std::sort(base.begin(), base.end());
  return base;
}

namespace {

std::vector<double> replicate(const std::vector<double>& unit_points, double delta, double lo, double hi) {
  std::vector<double> out;
  if (unit_points.empty()) return out;
  const double first = std::floor(lo / delta) - 1.0;
  const double last = std::ceil(hi / delta) + 1.0;
  for (double k = first; k <= last; k += 1.0) {
    for (double p : unit_points) {
      const double h = (k + p) * delta;
      if (h >= lo && h <= hi) out.push_back(h);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<double> PeriodicCoefficient::singular_points_scaled(double delta, double lo, double hi) const {
  return replicate(singular_points_in_q(), delta, lo, hi);
}

std::vector<double> PeriodicCoefficient::breakpoints_scaled(double delta, double lo, double hi) const {
  return replicate(breakpoints_in_q(), delta, lo, hi);
}

std::string PeriodicCoefficient::describe() const {
  char buf[128];
  switch (kind_) {
    case CoefficientKind::Constant: std::snprintf(buf, sizeof buf, "constant(c=%g)", c_); break;
    case CoefficientKind::SmoothCosine:
      std::snprintf(buf, sizeof buf, "smooth_cosine(offset=%g, amplitude=%g)", offset_, amplitude_);
      break;
    case CoefficientKind::Example1: std::snprintf(buf, sizeof buf, "example1(gamma=%g)", gamma_); break;
    case CoefficientKind::TensorProduct: {
      std::string s = "tensor(";
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i) s += ", ";
        s += factors_[i].describe();
      }
      return s + ")";
    }
  }
  std::string s = buf;
  if (shift_ != 0.0) {
    std::snprintf(buf, sizeof buf, " shifted by %g", shift_);
    s += buf;
  }
  return s;
}

PeriodicCoefficient shifted_coefficient(const PeriodicCoefficient& a, double shift) {
  if (a.dim() != 1) throw Error(ErrorKind::UnsupportedDimension, "shift is defined for 1-d coefficients");
  if (!(shift >= 0.0 && shift < 1.0)) throw Error(ErrorKind::Validation, "shift must lie in [0, 1)");
  if (a.kind() == CoefficientKind::Constant) return a;
  if (a.kind() == CoefficientKind::TensorProduct) {
    return PeriodicCoefficient::tensor_product({shifted_coefficient(a.factors().front(), shift)});
  }
  PeriodicCoefficient out = a;
  out.shift_ = wrap_unit(a.shift_ + shift);
  return out;
}

namespace {

std::vector<double> with_period_end(std::vector<double> pts) {
  // A singular point at 0 is also one at 1 for integration over [0, 1].
  for (std::size_t i = 0, n = pts.size(); i < n; ++i) {
    if (pts[i] == 0.0) pts.push_back(1.0);
  }
  return pts;
}

}  // namespace

double mean_value(const PeriodicCoefficient& a, const QuadratureConfig& cfg) {
  switch (a.kind()) {
    case CoefficientKind::Constant: return a.constant_value();
    case CoefficientKind::TensorProduct: {
      double m = 1.0;
      for (const auto& f : a.factors()) m *= mean_value(f, cfg);
      return m;
    }
    default: break;
  }
  const auto sing = with_period_end(a.singular_points_in_q());
  const auto brk = a.breakpoints_in_q();
  const auto out = integrate_singular([&a](double x) { return a.density(x); }, 0.0, 1.0, sing, cfg, brk);
  return out.value();
}

QuadratureOutcome power_integral(const PeriodicCoefficient& a, double p, const QuadratureConfig& cfg) {
  if (a.dim() != 1) throw Error(ErrorKind::UnsupportedDimension, "power_integral is 1-d");
  if (!(p > 0.0)) throw Error(ErrorKind::Domain, "power_integral requires p > 0");
  const auto sing = with_period_end(a.singular_points_in_q());
  const auto brk = a.breakpoints_in_q();
  return integrate_singular([&a, p](double x) { return std::pow(a.density(x), p); }, 0.0, 1.0, sing,
                            cfg, brk);
}

std::vector<double> cosine_coefficients(const PeriodicCoefficient& a, int count, const QuadratureConfig& cfg) {
  if (a.dim() != 1) throw Error(ErrorKind::UnsupportedDimension, "cosine series is 1-d");
  if (!a.even()) throw Error(ErrorKind::Validation, "cosine series requires an even coefficient");
  if (count < 1) return {};
  std::vector<double> c(count, 0.0);
  const double sign_half = (a.shift() == 0.5) ? -1.0 : 1.0;
  switch (a.kind()) {
    case CoefficientKind::Constant:
      c[0] = a.constant_value();
      return c;
    case CoefficientKind::SmoothCosine:
      c[0] = a.offset();
      if (count > 1) c[1] = sign_half * a.amplitude();
      return c;
    default: break;
  }
  c[0] = mean_value(a, cfg);
  const auto sing = with_period_end(a.singular_points_in_q());
  QuadratureConfig local = cfg;
  local.abs_tol = std::max(cfg.abs_tol, 1e-13);
  for (int k = 1; k < count; ++k) {
    std::vector<double> brk = a.breakpoints_in_q();
    // Zeros of the cosine keep each piece free of sign changes.
    for (int j = 0; j < 2 * k; ++j) brk.push_back((j + 0.5) / (2.0 * k));
    const double w = 2.0 * std::numbers::pi * k;
    const auto out = integrate_singular(
        [&a, w](double x) { return a.density(x) * std::cos(w * x); }, 0.0, 1.0, sing, local, brk);
    c[k] = 2.0 * (out.converged() ? out.value() : std::get<Inconclusive>(out.verdict).partial);
  }
  return c;
}

}  // namespace homog

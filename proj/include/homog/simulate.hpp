#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "homog/exponent.hpp"
#include "homog/form_eval.hpp"
#include "homog/test_function.hpp"

namespace homog {

/// Philox4x32-10 block cipher.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

/// Uniform random bit generator over one Philox substream. The key is the
/// seed; the upper counter words hold the stream id, the lower ones a block
/// index, so every (seed, stream) pair is an independent deterministic source.
class PhiloxEngine {
 public:
  using result_type = std::uint32_t;

  PhiloxEngine(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

enum class SmallJumpMode { Drop, GaussianSubstitute };

const char* to_string(SmallJumpMode m);

struct SimulationPlan {
  ModulatedMeasure measure;
  double t = 1.0;
  std::size_t n_samples = 100000;
  double r = 0.125;
  SmallJumpMode mode = SmallJumpMode::Drop;
  std::uint64_t seed = 1;
  /// Added to every substream id; lets one experiment draw several
  /// independent samples from one seed.
  std::uint64_t stream_offset = 0;

  /// Largest admissible cutoff, min(delta, 1) / 8.
  static double default_cutoff(double delta);
  void validate() const;
};

/// Inverse-CDF sampler for a density on [lo, hi], tabulated with monotone
/// cubic interpolation of the inverse; cells are split until the CDF error
/// is below `tol` times the total mass.
class InverseCdfTable {
 public:
  InverseCdfTable(const LocalIntegrand& density, double lo, double hi, std::span<const double> singular,
                  std::span<const double> breakpoints, double tol = 1e-10, const QuadratureConfig& cfg = {});

  double mass() const { return mass_; }
  std::size_t cells() const { return x_.size() - 1; }
  /// Point with normalized CDF value p in [0, 1].
  double quantile(double p) const;

 private:
  std::vector<double> x_;
  std::vector<double> cdf_;
  std::vector<double> slope_;  ///< dx/dp at the knots
  double mass_ = 0.0;
};

/// Jumps with |h| > r of a_delta nu: body table on (r, H], exact rejection
/// sampler for the stable tail past H.
class JumpSampler {
 public:
  JumpSampler(const ModulatedMeasure& m, double r, const QuadratureConfig& cfg = {});

  /// lambda_r = mass of {|h| > r}.
  double rate() const { return 2.0 * (body_mass_ + far_mass_); }
  /// Integral of h^2 a_delta nu over |h| <= r.
  double small_jump_variance() const { return small_variance_; }
  double body_limit() const { return body_hi_; }
  std::size_t table_cells() const { return body_.cells(); }

  double draw(PhiloxEngine& g) const;

 private:
  double draw_far(PhiloxEngine& g) const;

  InverseCdfTable body_;
  std::optional<InverseCdfTable> profile_;
  double delta_ = 1.0;
  double beta_ = 1.0;
  double body_hi_ = 0.0;
  double body_mass_ = 0.0;
  double far_mass_ = 0.0;
  double far_cell_ = 0.0;
  double small_variance_ = 0.0;
};

struct IncrementSample {
  std::vector<double> values;
  SimulationPlan plan;
  double rate = 0.0;
  double small_jump_variance = 0.0;
  double mean_jumps = 0.0;
  /// Substream ids are stream_offset + i for sample i.
  std::uint64_t first_stream = 0;
};

IncrementSample sample_increments(const SimulationPlan& plan, const QuadratureConfig& cfg = {});

/// Draws with an already built sampler (for several times or scalings).
IncrementSample sample_increments(const SimulationPlan& plan, const JumpSampler& jumps);

struct CFRow {
  double xi = 0.0;
  double empirical = 0.0;
  double model = 0.0;
  double half_width = 0.0;
  bool inside = false;
  double imag = 0.0;
  double imag_half_width = 0.0;
};

struct CFCheckResult {
  std::vector<CFRow> rows;
  double imag_max_abs = 0.0;
  bool imag_inside = true;
  std::size_t inside_count = 0;
};

/// Mean of cos(xi X) and sin(xi X) with 3 sigma half-widths.
CFCheckResult empirical_cf(const std::vector<double>& values, const std::vector<double>& xi_grid);

/// Adds the model e^{-t psi}: truncated exponent in Drop mode, full exponent
/// with the Gaussian substitute otherwise.
CFCheckResult empirical_cf(const IncrementSample& sample, const std::vector<double>& xi_grid);

/// Little-endian float64 values to `path` and the plan to `path`.json.
void write_sample(const IncrementSample& sample, const std::string& path);
std::vector<double> read_sample_values(const std::string& path);

struct RescaleRow {
  double eps = 0.0;
  double lhs = 0.0;  ///< eps^{1 - alpha} E~(u(eps .), v(eps .))
  double rhs = 0.0;  ///< form with a(. / eps)
  double rel_err = 0.0;
  double error_estimate = 0.0;
  bool holds = false;
};

struct RescaleReport {
  std::vector<RescaleRow> rows;
  bool passed = false;
};

RescaleReport rescaling_identity_check(const PeriodicCoefficient& a, double alpha, const std::vector<double>& eps_grid,
                                       const TestFunction& u, const TestFunction& v, double tolerance,
                                       const QuadratureConfig& cfg = {});

struct FddConfig {
  std::vector<double> eps;
  std::vector<double> t_grid;
  std::vector<double> xi_grid;
  std::size_t n_samples = 100000;
  std::uint64_t seed = 1;
  /// Jump cutoff of the unscaled process.
  double r = 0.125;
};

/// Rows per (eps, t, xi) with delta = eps and method "t=<t>", plus two-time
/// rows "joint" for the first two times. error_estimate holds the 3 sigma
/// half-width; the report passes when every row at the smallest eps lies
/// inside it.
ConvergenceReport fdd_convergence_experiment(const PeriodicCoefficient& a, double alpha, const FddConfig& fc,
                                             const QuadratureConfig& cfg = {});

}  // namespace homog

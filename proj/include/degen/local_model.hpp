#pragma once

#include "degen/dual_complex.hpp"
#include "degen/test_function.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace degen {

/// Monomial chart: X_0 = sum b_i {z_i = 0}, B = sum beta_j {w_j = 0} on a
/// unit polydisc, with the form's coefficient |z|^a |w|^-beta and a constant
/// residue weight.
struct LocalChart {
  std::vector<std::int64_t> b;
  std::vector<Rational> a;
  std::vector<Rational> beta;
  double residue_weight = 1.0;
  /// Scaling exponents; default to the chart's own minimum and essential
  /// dimension. Override to embed the chart in a larger model.
  std::optional<Rational> kappa_min;
  std::optional<int> d;
};

/// Measure normalization constant of the log-polar substitution, with |dz|^2
/// read as Lebesgue area so that |dz/z|^2 = d(rho) d(theta).
inline constexpr double kLogPolarConstant = 1.0;

/// Face of the chart, coordinates x0..xp, y1..yq.
Face chart_face(const LocalChart& chart);
void validate_chart(const LocalChart& chart);

Rational chart_kappa_min(const LocalChart& chart);
int chart_d(const LocalChart& chart);

/// Sign and log-magnitude, for masses far outside double range.
struct LogValue {
  int sign = 0;
  double log_abs = -std::numeric_limits<double>::infinity();

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

/// (log|z_i| / log|f_U|, log|w_j| / log|f_U|) with log|f_U| = sum b_i log|z_i|.
VectorX<double> log_map(const LocalChart& chart, std::span<const double> z_abs, std::span<const double> w_abs);

struct ReducedOptions {
  bool allow_non_sublc = false;  // probe divergence when some beta_j > 1
  double abs_tol = 1e-10;
};

/// Scaled fiber mass I(L) = mu_t(f o Log) / (|t|^{2 kappa_min} (2 pi L)^d)
/// at L = log|t|^-1.
double reduced_integral(const LocalChart& chart, const FaceFunction& f, double L, const ReducedOptions& opts = {});
LogValue log_scaled_mass(const LocalChart& chart, const FaceFunction& f, double L, const ReducedOptions& opts = {});
/// mu_t(f o Log) without the scaling.
LogValue log_unscaled_mass(const LocalChart& chart, const FaceFunction& f, double L, const ReducedOptions& opts = {});

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Monte Carlo estimate of the scaled fiber mass on {prod z_i^b_i = t},
/// sampling log-radii uniformly and solving for z_0. Results depend only on
/// (seed, samples, workers).
McEstimate direct_fiber_mass_mc(const LocalChart& chart, const FaceFunction& f, double t_abs, std::uint64_t samples,
                                std::uint64_t seed, unsigned workers = 1);

/// rw * prod_{non-essential i} pi / (a_i - kappa_min b_i) * prod_{beta_j < 1} pi / (1 - beta_j).
double residue_mass(const LocalChart& chart);

/// Limit of I(L) as L -> infinity: the residue mass times the integral of
/// f against b_sigma^-1 lambda over the chart's essential face, or 0 when
/// that face is missing or too small.
double limit_value(const LocalChart& chart, const FaceFunction& f);

struct MassSample {
  double L = 0.0;
  double log_mass = 0.0;
};

enum class ModelForm {
  DecayPower,  // log m = -2 kappa L - d log L + c
  FiberMass,   // log m = -2 kappa L + d log L + c
};

struct ExponentFit {
  double kappa_hat = 0.0;
  double d_hat = 0.0;
  double intercept = 0.0;
  double growth_rate = 0.0;  // coefficient of L, equal to -2 kappa_hat
  double residual_rms = 0.0;
};

ExponentFit fit_exponents(std::span<const MassSample> samples, ModelForm form);

struct ConvergenceRun {
  std::vector<double> L_values;
  std::vector<double> integrals;
  std::vector<LogValue> unscaled;
  double limit_estimate = 0.0;
  std::optional<ExponentFit> fit;
};

ConvergenceRun convergence_run(const LocalChart& chart, const FaceFunction& f, std::span<const double> L_values,
                               const ReducedOptions& opts = {});

}  // namespace degen

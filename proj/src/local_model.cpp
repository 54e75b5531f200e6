#include "degen/local_model.hpp"

#include "degen/errors.hpp"
#include "degen/quadrature.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace degen {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_sub_lc(const LocalChart& chart) {
  return std::all_of(chart.beta.begin(), chart.beta.end(), [](const Rational& b) { return b <= 1; });
}

Rational own_kappa_min(const LocalChart& chart) {
  Rational k = chart.a[0] / chart.b[0];
  for (std::size_t i = 1; i < chart.b.size(); ++i) k = std::min<Rational>(k, chart.a[i] / chart.b[i]);
  return k;
}

std::vector<int> essential_verticals(const LocalChart& chart, const Rational& kappa) {
  std::vector<int> out;
  for (std::size_t i = 0; i < chart.b.size(); ++i)
    if (chart.a[i] / chart.b[i] == kappa) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> essential_horizontals(const LocalChart& chart) {
  std::vector<int> out;
  for (std::size_t j = 0; j < chart.beta.size(); ++j)
    if (chart.beta[j] == 1) out.push_back(static_cast<int>(j));
  return out;
}

void require_sub_lc(const LocalChart& chart) {
  std::vector<std::string> bad;
  for (std::size_t j = 0; j < chart.beta.size(); ++j)
    if (chart.beta[j] > 1) bad.push_back("y" + std::to_string(j + 1));
  if (!bad.empty()) throw NonSubLogCanonical("chart is not sub-log-canonical: beta > 1 on " + bad.front(), bad);
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform in (0, 1) from the counter (seed, sample, dimension).
double uniform(std::uint64_t seed, std::uint64_t n, std::uint64_t dim) {
  std::uint64_t h = splitmix(splitmix(seed) ^ (n * 0xD1B54A32D192ED03ull + dim * 0x8CB92BA72F3D8DD7ull));
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

struct Welford {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  void merge(const Welford& o) {
    if (o.n == 0) return;
    std::uint64_t total = n + o.n;
    double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.n) / static_cast<double>(total);
    m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / static_cast<double>(total);
    n = total;
  }
};

}  // namespace

void validate_chart(const LocalChart& chart) {
  if (chart.b.empty()) throw ValidationError("chart needs at least one vertical coordinate");
  if (chart.a.size() != chart.b.size()) throw ValidationError("chart a and b have different lengths");
  for (auto b : chart.b)
    if (b < 1) throw ValidationError("chart multiplicities must be positive");
  if (!std::isfinite(chart.residue_weight) || chart.residue_weight < 0)
    throw ValidationError("residue weight must be finite and nonnegative");
  if (chart.kappa_min && *chart.kappa_min > own_kappa_min(chart))
    throw ValidationError("kappa_min exceeds the chart's smallest a_i/b_i");
  if (chart.d) {
    if (*chart.d < 0) throw ValidationError("d must be nonnegative");
    auto ev = essential_verticals(chart, chart_kappa_min(chart));
    if (!ev.empty()) {
      int own = static_cast<int>(ev.size()) - 1 + static_cast<int>(essential_horizontals(chart).size());
      if (*chart.d < own) throw ValidationError("d is smaller than the dimension of the chart's essential face");
    }
  }
}

Face chart_face(const LocalChart& chart) {
  validate_chart(chart);
  return make_face(chart.b, chart.a, chart.beta);
}

Rational chart_kappa_min(const LocalChart& chart) { return chart.kappa_min.value_or(own_kappa_min(chart)); }

int chart_d(const LocalChart& chart) {
  if (chart.d) return *chart.d;
  auto ev = essential_verticals(chart, chart_kappa_min(chart));
  if (ev.empty()) return 0;
  return static_cast<int>(ev.size()) - 1 + static_cast<int>(essential_horizontals(chart).size());
}

VectorX<double> log_map(const LocalChart& chart, std::span<const double> z_abs, std::span<const double> w_abs) {
  if (z_abs.size() != chart.b.size() || w_abs.size() != chart.beta.size())
    throw ValidationError("log_map needs one magnitude per chart coordinate");
  double logf = 0.0;
  for (std::size_t i = 0; i < z_abs.size(); ++i) {
    if (!(z_abs[i] > 0.0 && z_abs[i] < 1.0)) throw ValidationError("log_map magnitudes must lie in (0, 1)");
    logf += static_cast<double>(chart.b[i]) * std::log(z_abs[i]);
  }
  for (double w : w_abs)
    if (!(w > 0.0 && w < 1.0)) throw ValidationError("log_map magnitudes must lie in (0, 1)");
  VectorX<double> out(static_cast<Eigen::Index>(z_abs.size() + w_abs.size()));
  for (std::size_t i = 0; i < z_abs.size(); ++i) out[static_cast<Eigen::Index>(i)] = std::log(z_abs[i]) / logf;
  for (std::size_t j = 0; j < w_abs.size(); ++j)
    out[static_cast<Eigen::Index>(z_abs.size() + j)] = std::log(w_abs[j]) / logf;
  return out;
}

LogValue log_scaled_mass(const LocalChart& chart, const FaceFunction& f, double L, const ReducedOptions& opts) {
  const Face face = chart_face(chart);
  if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("L must be positive and finite");
  const bool sub_lc = is_sub_lc(chart);
  if (!sub_lc && !opts.allow_non_sublc) require_sub_lc(chart);
  if (f.ambient() != face.ambient()) throw ValidationError("test function does not match the chart's coordinates");

  const Rational kmin_own = own_kappa_min(chart);
  const Rational kscale = chart_kappa_min(chart);
  const int d = chart_d(chart);
  int e = 0;
  while (chart.a[e] / chart.b[e] != kmin_own) ++e;

  std::vector<double> rates;
  for (int i = 0; i < face.p_plus_1(); ++i)
    if (i != e) rates.push_back(2.0 * L * to_double(chart.a[i] - kmin_own * chart.b[i]));
  for (const auto& beta : chart.beta) rates.push_back(2.0 * L * to_double(1 - beta));

  LogValue out;
  if (chart.residue_weight == 0.0) return out;
  auto q = integrate_reduced(face, e, f, rates);
  const int pq = face.dim();
  double log_pref = std::log(kLogPolarConstant * chart.residue_weight) + (pq - d) * std::log(2.0 * kPi * L) -
                    std::log(static_cast<double>(chart.b[e])) - 2.0 * L * to_double(kmin_own - kscale) + q.log_shift;
  double abs_err = q.abs_error > 0 ? std::exp(log_pref + std::log(q.abs_error)) : 0.0;
  if (q.value != 0.0) {
    out.sign = q.value > 0 ? 1 : -1;
    out.log_abs = log_pref + std::log(std::abs(q.value));
  }
  if (sub_lc) {
    if (abs_err > opts.abs_tol)
      throw NumericalError("quadrature error " + std::to_string(abs_err) + " exceeds tolerance at L=" + std::to_string(L));
  } else if (q.value != 0.0 && q.abs_error > 1e-10 * std::abs(q.value)) {
    throw NumericalError("quadrature relative error exceeds 1e-10 at L=" + std::to_string(L));
  }
  return out;
}

double reduced_integral(const LocalChart& chart, const FaceFunction& f, double L, const ReducedOptions& opts) {
  auto v = log_scaled_mass(chart, f, L, opts);
  if (v.log_abs > 700.0)
    throw NumericalError("scaled mass overflows a double at L=" + std::to_string(L) + "; use the log-domain mass");
  return v.value();
}

LogValue log_unscaled_mass(const LocalChart& chart, const FaceFunction& f, double L, const ReducedOptions& opts) {
  auto v = log_scaled_mass(chart, f, L, opts);
  if (v.sign != 0) v.log_abs += -2.0 * L * to_double(chart_kappa_min(chart)) + chart_d(chart) * std::log(2.0 * kPi * L);
  return v;
}

McEstimate direct_fiber_mass_mc(const LocalChart& chart, const FaceFunction& f, double t_abs, std::uint64_t samples,
                                std::uint64_t seed, unsigned workers) {
  const Face face = chart_face(chart);
  if (!(t_abs > 0.0 && t_abs < 1.0)) throw ValidationError("t_abs must lie in (0, 1)");
  if (samples == 0) throw ValidationError("Monte Carlo needs at least one sample");
  if (workers == 0) workers = 1;
  if (f.ambient() != face.ambient()) throw ValidationError("test function does not match the chart's coordinates");
  const double L = -std::log(t_abs);
  const int p1 = face.p_plus_1();
  const int q = face.q();
  auto S = f.support_bounds(face);
  for (double s : S)
    if (!std::isfinite(s)) throw ValidationError("Monte Carlo needs compact support in every horizontal direction");

  McEstimate est;
  double log_box = 0.0;
  for (int i = 1; i < p1; ++i) log_box += std::log(2.0 * kPi * L / static_cast<double>(chart.b[i]));
  for (int j = 0; j < q; ++j) {
    if (S[j] <= 0.0) return est;
    log_box += std::log(2.0 * kPi * L * S[j]);
  }
  const double log_scale = -2.0 * L * to_double(chart_kappa_min(chart)) + chart_d(chart) * std::log(2.0 * kPi * L);
  const double b0 = static_cast<double>(chart.b[0]);
  std::vector<double> a(p1), beta(q), b(p1);
  for (int i = 0; i < p1; ++i) {
    a[i] = to_double(chart.a[i]);
    b[i] = static_cast<double>(chart.b[i]);
  }
  for (int j = 0; j < q; ++j) beta[j] = to_double(chart.beta[j]);

  auto sample = [&](std::uint64_t n) -> double {
    std::vector<double> z(p1), w(q);
    std::vector<double> logz(p1), logw(q);
    double sum = -L;
    for (int i = 1; i < p1; ++i) {
      double rho = uniform(seed, n, static_cast<std::uint64_t>(i)) * L / b[i];
      logz[i] = -rho;
      sum += b[i] * rho;
    }
    logz[0] = sum / b0;  // from prod |z_i|^{b_i} = |t|
    if (logz[0] >= 0.0) return 0.0;
    for (int j = 0; j < q; ++j)
      logw[j] = -uniform(seed, n, static_cast<std::uint64_t>(p1 + j)) * L * S[j];
    for (int i = 0; i < p1; ++i) z[i] = std::exp(logz[i]);
    for (int j = 0; j < q; ++j) w[j] = std::exp(logw[j]);
    if (std::any_of(z.begin(), z.end(), [](double v) { return !(v > 0.0 && v < 1.0); }) ||
        std::any_of(w.begin(), w.end(), [](double v) { return !(v > 0.0 && v < 1.0); }))
      return 0.0;
    double fv = f(log_map(chart, z, w));
    if (fv == 0.0) return 0.0;
    // |alpha|^2 for the form on the fiber, in the chart z_1..z_p, w_1..w_q
    double log_alpha2 = -2.0 * std::log(b0);
    for (int i = 0; i < p1; ++i) log_alpha2 += 2.0 * a[i] * logz[i];
    for (int i = 1; i < p1; ++i) log_alpha2 -= 2.0 * logz[i];
    for (int j = 0; j < q; ++j) log_alpha2 -= 2.0 * beta[j] * logw[j];
    // Lebesgue area |dz|^2 = |z|^2 d(rho) d(theta) in each coordinate
    double log_jac = 0.0;
    for (int i = 1; i < p1; ++i) log_jac += 2.0 * logz[i];
    for (int j = 0; j < q; ++j) log_jac += 2.0 * logw[j];
    // all b_0 roots z_0 share the same magnitude
    return chart.residue_weight * fv * std::exp(log_alpha2 + log_jac + std::log(b0) + log_box - log_scale);
  };

  std::vector<Welford> parts(workers);
  std::vector<std::thread> threads;
  for (unsigned k = 0; k < workers; ++k) {
    std::uint64_t lo = samples * k / workers, hi = samples * (k + 1) / workers;
    threads.emplace_back([&, k, lo, hi] {
      Welford acc;
      for (std::uint64_t n = lo; n < hi; ++n) acc.add(sample(n));
      parts[k] = acc;
    });
  }
  for (auto& t : threads) t.join();
  Welford total;
  for (const auto& p : parts) total.merge(p);
  est.mean = total.mean;
  est.stderr_ = total.n > 1 ? std::sqrt(total.m2 / static_cast<double>(total.n - 1) / static_cast<double>(total.n)) : 0.0;
  return est;
}

double residue_mass(const LocalChart& chart) {
  validate_chart(chart);
  const Rational k = chart_kappa_min(chart);
  double m = chart.residue_weight;
  for (std::size_t i = 0; i < chart.b.size(); ++i) {
    Rational c = chart.a[i] - k * chart.b[i];
    if (c != 0) m *= kPi / to_double(c);
  }
  for (const auto& beta : chart.beta)
    if (beta < 1) m *= kPi / to_double(1 - beta);
  return m;
}

double limit_value(const LocalChart& chart, const FaceFunction& f) {
  const Face face = chart_face(chart);
  require_sub_lc(chart);
  if (f.ambient() != face.ambient()) throw ValidationError("test function does not match the chart's coordinates");
  auto ev = essential_verticals(chart, chart_kappa_min(chart));
  auto eh = essential_horizontals(chart);
  if (ev.empty()) return 0.0;
  const int dim = static_cast<int>(ev.size()) - 1 + static_cast<int>(eh.size());
  if (dim < chart_d(chart)) return 0.0;

  std::vector<std::int64_t> b;
  std::vector<Rational> a, beta;
  StratumKey key;
  std::vector<int> embed;
  for (int i : ev) {
    b.push_back(chart.b[i]);
    a.push_back(chart.a[i]);
    key.verticals.push_back(face.key.verticals[i]);
    embed.push_back(i);
  }
  for (int j : eh) {
    beta.push_back(chart.beta[j]);
    key.horizontals.push_back(face.key.horizontals[j]);
    embed.push_back(face.p_plus_1() + j);
  }
  Face sub = make_face(std::move(b), std::move(a), std::move(beta), key);
  MatrixX<double> m = MatrixX<double>::Zero(face.ambient(), sub.ambient());
  for (std::size_t k = 0; k < embed.size(); ++k) m(embed[k], static_cast<Eigen::Index>(k)) = 1.0;
  auto restricted = f.pullback(m, sub.coordinate_ids());
  return residue_mass(chart) * integrate_on_face(sub, Rational(1) / sub.b[0], restricted, 0);
}

ExponentFit fit_exponents(std::span<const MassSample> samples, ModelForm form) {
  if (samples.size() < 4) throw ValidationError("exponent fit needs at least 4 samples");
  double lmin = samples[0].L, lmax = samples[0].L;
  for (const auto& s : samples) {
    if (!(s.L > 0.0) || !std::isfinite(s.L) || !std::isfinite(s.log_mass))
      throw ValidationError("exponent fit needs positive L and finite log masses");
    lmin = std::min(lmin, s.L);
    lmax = std::max(lmax, s.L);
  }
  if (lmax < 100.0 * lmin * (1.0 - 1e-12)) throw ValidationError("exponent fit needs L spread over two decades");
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    design(r, 0) = samples[r].L / lmax;
    design(r, 1) = std::log(samples[r].L);
    design(r, 2) = 1.0;
    rhs[r] = samples[r].log_mass;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) throw ValidationError("exponent fit design matrix is degenerate");
  Eigen::Vector3d c = qr.solve(rhs);
  ExponentFit fit;
  fit.growth_rate = c[0] / lmax;
  fit.kappa_hat = -fit.growth_rate / 2.0;
  fit.d_hat = form == ModelForm::FiberMass ? c[1] : -c[1];
  fit.intercept = c[2];
  fit.residual_rms = std::sqrt((design * c - rhs).squaredNorm() / static_cast<double>(n));
  return fit;
}

ConvergenceRun convergence_run(const LocalChart& chart, const FaceFunction& f, std::span<const double> L_values,
                               const ReducedOptions& opts) {
  if (L_values.empty()) throw ValidationError("L schedule is empty");
  for (std::size_t i = 0; i < L_values.size(); ++i) {
    if (!(L_values[i] > 0.0) || !std::isfinite(L_values[i])) throw ValidationError("L values must be positive");
    if (i > 0 && !(L_values[i] > L_values[i - 1])) throw ValidationError("L schedule must be strictly increasing");
  }
  ConvergenceRun run;
  run.L_values.assign(L_values.begin(), L_values.end());
  for (double L : L_values) {
    auto scaled = log_scaled_mass(chart, f, L, opts);
    run.integrals.push_back(scaled.value());
    auto raw = scaled;
    if (raw.sign != 0)
      raw.log_abs += -2.0 * L * to_double(chart_kappa_min(chart)) + chart_d(chart) * std::log(2.0 * kPi * L);
    run.unscaled.push_back(raw);
  }
  run.limit_estimate = is_sub_lc(chart) ? limit_value(chart, f) : std::numeric_limits<double>::quiet_NaN();
  std::vector<MassSample> pts;
  for (std::size_t i = 0; i < run.L_values.size(); ++i)
    if (run.unscaled[i].sign > 0) pts.push_back({run.L_values[i], run.unscaled[i].log_abs});
  if (pts.size() >= 4 && pts.back().L >= 100.0 * pts.front().L * (1.0 - 1e-12))
    run.fit = fit_exponents(pts, ModelForm::FiberMass);
  return run;
}

}  // namespace degen

#include "degen/quadrature.hpp"

#include "degen/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace degen {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

constexpr double kLayerPoints[] = {0.5, 2.0, 8.0, 32.0};
constexpr double kLayerCutoff = 80.0;

// Boost reports the error of the [-1, 1] pass without the interval's half
// width, so short segments look far worse than they are. Map to [-1, 1]
// ourselves and rescale both numbers.
template <class F>
double gk_segment(F&& g, double a, double b, double rel_tol, double& err) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double e = 0.0, l1 = 0.0;
  double v = GK::integrate([&](double s) { return g(mid + half * s); }, -1.0, 1.0, 15, rel_tol, &e, &l1);
  err = half * e;
  return half * v;
}

struct ReducedFactor {
  std::vector<double> alpha;  // coefficients on free coordinates
  double gamma = 0.0;
  std::vector<double> breaks;
  int last = -1;  // innermost free coordinate the form depends on
};

struct Level {
  double value = 0.0;
  double error = 0.0;
};

class Integrator {
 public:
  Integrator(const Face& face, int e, const FaceFunction& f, std::span<const double> rates, double rel_tol)
      : face_(face), e_(e), f_(f), rel_tol_(rel_tol) {
    const int p1 = face.p_plus_1();
    be_ = static_cast<double>(face.b[e]);
    for (int i = 0; i < p1; ++i)
      if (i != e) {
        free_index_.push_back(i);
        bfree_.push_back(static_cast<double>(face.b[i]));
      }
    nx_ = static_cast<int>(bfree_.size());
    auto bounds = f.support_bounds(face);
    for (int j = 0; j < face.q(); ++j) {
      if (!std::isfinite(bounds[j]))
        throw ValidationError("test function has unbounded support along " + face.key.horizontals[j] +
                              " on face " + to_string(face.key));
      free_index_.push_back(p1 + j);
      hi_y_.push_back(bounds[j]);
    }
    n_ = static_cast<int>(free_index_.size());
    if (static_cast<int>(rates.size()) != n_) throw ValidationError("one exponential rate per free coordinate is required");
    rates_.assign(rates.begin(), rates.end());
    for (int k = 0; k < n_; ++k) {
      if (rates_[k] < 0 && k < nx_) throw ValidationError("negative exponential rate on a vertical coordinate");
      if (rates_[k] < 0) log_shift_ += -rates_[k] * hi_y_[k - nx_];
    }
    // Substitute x_e = (1 - sum b_i x_i)/b_e into every profiled form.
    for (const auto& t : f.terms())
      for (const auto& fac : t.factors) {
        if (!fac.profile) continue;
        ReducedFactor r;
        const auto& c = fac.form.coeffs;
        double ce = c[e];
        r.gamma = fac.form.constant + ce / be_;
        for (int k = 0; k < n_; ++k) {
          int idx = free_index_[k];
          double a = c[idx];
          if (k < nx_) a -= ce * bfree_[k] / be_;
          r.alpha.push_back(a);
          if (a != 0.0) r.last = k;
        }
        r.breaks = fac.profile->breaks();
        if (r.last >= 0) factors_.push_back(std::move(r));
      }
  }

  QuadratureResult run() {
    std::vector<double> u(static_cast<std::size_t>(n_), 0.0);
    QuadratureResult out;
    out.log_shift = log_shift_;
    if (n_ == 0) {
      out.value = f_(full(u));
      return out;
    }
    auto lv = level(0, u);
    out.value = lv.value;
    out.abs_error = lv.error;
    return out;
  }

 private:
  VectorX<double> full(const std::vector<double>& u) const {
    VectorX<double> x = VectorX<double>::Zero(face_.ambient());
    double s = 1.0;
    for (int k = 0; k < n_; ++k) {
      x[free_index_[k]] = u[k];
      if (k < nx_) s -= bfree_[k] * u[k];
    }
    x[e_] = std::max(0.0, s / be_);
    return x;
  }

  double upper(int k, const std::vector<double>& u) const {
    if (k >= nx_) return hi_y_[k - nx_];
    double s = 1.0;
    for (int m = 0; m < k; ++m) s -= bfree_[m] * u[m];
    return std::max(0.0, s / bfree_[k]);
  }

  // Points in (lo, hi) where the level-k integrand may fail to be smooth.
  std::vector<double> breakpoints(int k, const std::vector<double>& u, double lo, double hi) const {
    std::vector<double> pts;
    double slack = 0.0;  // remaining simplex budget before coordinate k
    for (int m = 0; m < std::min(k, nx_); ++m) slack += bfree_[m] * u[m];
    slack = 1.0 - slack;
    for (const auto& fac : factors_) {
      if (fac.last < k) continue;
      double partial = fac.gamma;
      for (int m = 0; m < k; ++m) partial += fac.alpha[m] * u[m];
      if (fac.last == k) {
        if (fac.alpha[k] != 0.0)
          for (double t : fac.breaks) pts.push_back((t - partial) / fac.alpha[k]);
        continue;
      }
      // Corners of the inner region, as affine functions A*u_k + B.
      const int inner_x0 = std::max(k + 1, 0);
      std::vector<std::pair<double, double>> simplex_corners{{0.0, 0.0}};
      for (int m = inner_x0; m < nx_; ++m) {
        double coef = fac.alpha[m] / bfree_[m];
        if (k < nx_)
          simplex_corners.push_back({-coef * bfree_[k], coef * slack});
        else
          simplex_corners.push_back({0.0, coef * slack});
      }
      const int y0 = std::max(k + 1, nx_);
      const int ny_inner = n_ - y0;
      for (const auto& [sa, sb] : simplex_corners) {
        for (int mask = 0; mask < (1 << ny_inner); ++mask) {
          double A = fac.alpha[k] + sa;
          double B = partial + sb;
          for (int j = 0; j < ny_inner; ++j)
            if (mask & (1 << j)) B += fac.alpha[y0 + j] * hi_y_[y0 + j - nx_];
          if (A == 0.0) continue;
          for (double t : fac.breaks) pts.push_back((t - B) / A);
        }
      }
    }
    std::vector<double> inside;
    const double eps = 1e-14 * std::max(1.0, std::abs(hi - lo));
    for (double p : pts)
      if (std::isfinite(p) && p > lo + eps && p < hi - eps) inside.push_back(p);
    return inside;
  }

  Level level(int k, std::vector<double>& u) {
    double lo = 0.0;
    double hi = upper(k, u);
    if (!(hi > lo)) return {};
    const double r = rates_[k];
    double anchor = lo;
    std::vector<double> pts = breakpoints(k, u, lo, hi);
    if (r > 0.0) {
      for (double c : kLayerPoints) pts.push_back(lo + c / r);
      hi = std::min(hi, lo + kLayerCutoff / r);
    } else if (r < 0.0) {
      anchor = hi;
      for (double c : kLayerPoints) pts.push_back(hi + c / r);
      lo = std::max(lo, hi + kLayerCutoff / r);
    }
    pts.push_back(lo);
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());
    std::vector<double> cuts;
    for (double p : pts) {
      if (p < lo || p > hi) continue;
      if (cuts.empty() || p > cuts.back()) cuts.push_back(p);
    }

    double inner_err = 0.0;
    auto integrand = [&](double t) {
      u[k] = t;
      double w = r == 0.0 ? 1.0 : std::exp(-r * (t - anchor));
      if (k + 1 == n_) return w * f_(full(u));
      auto inner = level(k + 1, u);
      inner_err = std::max(inner_err, w * inner.error);
      return w * inner.value;
    };

    Level out;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      double err = 0.0;
      out.value += gk_segment(integrand, cuts[s], cuts[s + 1], rel_tol_, err);
      out.error += err;
    }
    out.error += inner_err * (hi - lo);
    return out;
  }

  const Face& face_;
  int e_;
  const FaceFunction& f_;
  double rel_tol_;
  double be_ = 1.0;
  int nx_ = 0, n_ = 0;
  std::vector<int> free_index_;
  std::vector<double> bfree_;
  std::vector<double> hi_y_;
  std::vector<double> rates_;
  std::vector<ReducedFactor> factors_;
  double log_shift_ = 0.0;
};

}  // namespace

QuadratureResult integrate_reduced(const Face& face, int eliminated, const FaceFunction& f,
                                   std::span<const double> rates, double rel_tol) {
  if (eliminated < 0 || eliminated >= face.p_plus_1())
    throw ValidationError("eliminated index out of range for face " + to_string(face.key));
  if (f.ambient() != face.ambient())
    throw ValidationError("test function does not match the coordinates of face " + to_string(face.key));
  return Integrator(face, eliminated, f, rates, rel_tol).run();
}

}  // namespace degen

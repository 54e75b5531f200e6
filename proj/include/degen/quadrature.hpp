#pragma once

#include "degen/dual_complex.hpp"
#include "degen/test_function.hpp"

#include <span>
#include <vector>

namespace degen {

struct QuadratureResult {
  double value = 0.0;      // integral of the shifted integrand
  double abs_error = 0.0;  // estimate, same scale as value
  double log_shift = 0.0;  // true integral = value * exp(log_shift)
};

/// Integrates f(u) * exp(-sum_k rates[k] * u_k) over the free coordinates u
/// of a face after eliminating x_e: the simplex sum_{i != e} b_i x_i <= 1
/// times the boxes [0, S_j] from f's support.
///
/// Rates on horizontal coordinates may be negative; those factors are
/// rescaled by their maximum and the rescaling is returned in log_shift.
/// Vertical rates must be nonnegative.
QuadratureResult integrate_reduced(const Face& face, int eliminated, const FaceFunction& f,
                                   std::span<const double> rates, double rel_tol = 1e-13);

}  // namespace degen

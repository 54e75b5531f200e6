#pragma once

#include "degen/dual_complex.hpp"
#include "degen/model.hpp"
#include "degen/rational.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace degen {

struct WeightProfile {
  std::map<std::string, Rational> kappa;  // a_i / b_i
  Rational kappa_min{0};
  std::set<StratumKey> essential_faces;
  int d = 0;
};

struct SubLcReport {
  bool ok = true;
  std::vector<std::string> offending;  // horizontal ids with beta > 1
};

SubLcReport check_sub_log_canonical(const ModelData& model);

/// Throws NonSubLogCanonical when some beta_j > 1.
WeightProfile weight_profile(const DualComplex& complex);
WeightProfile weight_profile(const ModelData& model, const DualComplex& complex);

/// True when every vertical of the face has kappa = kappa_min and every
/// horizontal has beta = 1.
bool is_essential(const Face& face, const Rational& kappa_min);

/// W = sum a_i x_i + sum (1 - beta_j) y_j at a point of the face.
Rational weight_function_eval(const Face& face, const VectorXq& point);
Rational weight_function_eval(const ModelData& model, const Face& face, const VectorXq& point);

}  // namespace degen

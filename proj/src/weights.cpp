#include "degen/weights.hpp"

#include "degen/errors.hpp"

#include <algorithm>

namespace degen {

SubLcReport check_sub_log_canonical(const ModelData& model) {
  SubLcReport report;
  for (const auto& h : model.horizontals)
    if (h.beta > 1) report.offending.push_back(h.id);
  report.ok = report.offending.empty();
  return report;
}

bool is_essential(const Face& face, const Rational& kappa_min) {
  for (int i = 0; i < face.p_plus_1(); ++i)
    if (face.a[i] / face.b[i] != kappa_min) return false;
  return std::all_of(face.beta.begin(), face.beta.end(), [](const Rational& b) { return b == 1; });
}

WeightProfile weight_profile(const DualComplex& complex) {
  const auto& model = complex.model();
  auto report = check_sub_log_canonical(model);
  if (!report.ok) {
    std::string names;
    for (const auto& id : report.offending) names += (names.empty() ? "" : ", ") + id;
    throw NonSubLogCanonical("pair is not sub-log-canonical: beta > 1 on " + names, report.offending);
  }
  if (model.verticals.empty()) throw ValidationError("model has no vertical components");
  WeightProfile profile;
  bool first = true;
  for (const auto& v : model.verticals) {
    Rational k = v.a / v.b;
    profile.kappa[v.id] = k;
    if (first || k < profile.kappa_min) profile.kappa_min = k;
    first = false;
  }
  for (const auto& face : complex.faces()) {
    if (!is_essential(face, profile.kappa_min)) continue;
    profile.essential_faces.insert(face.key);
    profile.d = std::max(profile.d, face.dim());
  }
  return profile;
}

WeightProfile weight_profile(const ModelData& model, const DualComplex& complex) {
  if (model_fingerprint(model) != complex.fingerprint())
    throw ValidationError("dual complex was not built from this model");
  return weight_profile(complex);
}

Rational weight_function_eval(const Face& face, const VectorXq& point) {
  face.require_contains(point);
  Rational w = 0;
  for (int i = 0; i < face.p_plus_1(); ++i) w += face.a[i] * point[i];
  for (int j = 0; j < face.q(); ++j) w += (1 - face.beta[j]) * point[face.p_plus_1() + j];
  return w;
}

Rational weight_function_eval(const ModelData& model, const Face& face, const VectorXq& point) {
  face.require_contains(point);
  Rational w = 0;
  for (int i = 0; i < face.p_plus_1(); ++i) w += model.vertical(face.key.verticals[i]).a * point[i];
  for (int j = 0; j < face.q(); ++j)
    w += (1 - model.horizontal(face.key.horizontals[j]).beta) * point[face.p_plus_1() + j];
  return w;
}

}  // namespace degen

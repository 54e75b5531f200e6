#include "degen/limit_measure.hpp"

#include "degen/errors.hpp"

#include <cmath>
#include <set>

namespace degen {

LimitMeasure build_limit_measure(const WeightProfile& profile, const DualComplex& complex,
                                 const ResidueMassTable& masses) {
  std::set<StratumKey> expected;
  for (const auto& key : profile.essential_faces) {
    const Face& f = complex.face(key);
    if (f.dim() == profile.d) expected.insert(f.key);
  }
  std::map<StratumKey, double> given;
  for (const auto& [key, mass] : masses) {
    auto idx = complex.index_of(key);
    if (!idx) throw ValidationError("residue mass given for unknown face " + to_string(key));
    const auto& canon = complex.faces()[*idx].key;
    if (!expected.count(canon))
      throw ValidationError("residue mass given for " + to_string(canon) + ", which is not a " +
                            std::to_string(profile.d) + "-dimensional essential face");
    if (!std::isfinite(mass) || mass < 0) throw ValidationError("residue mass for " + to_string(canon) + " must be finite and nonnegative");
    given[canon] = mass;
  }
  for (const auto& key : expected)
    if (!given.count(key)) throw ValidationError("missing residue mass for essential face " + to_string(key));

  LimitMeasure m;
  m.complex_key = complex.fingerprint();
  m.d = profile.d;
  for (const auto& face : complex.faces()) {
    auto it = given.find(face.key);
    if (it == given.end()) continue;
    MeasureComponent c;
    c.face = face;
    c.residue_mass = it->second;
    c.density = it->second / static_cast<double>(face.b[0]);
    c.eliminated = 0;
    m.components.push_back(std::move(c));
  }
  return m;
}

double integrate_limit(const LimitMeasure& measure, const TestFunction& f) {
  if (f.complex().fingerprint() != measure.complex_key)
    throw ValidationError("test function and measure live on different complexes");
  f.require_consistent();
  double total = 0.0;
  for (const auto& c : measure.components)
    total += c.density * integrate_on_face(c.face, Rational(1), f.on(c.face.key), c.eliminated);
  return total;
}

namespace {

// Free-coordinate parametrization of a face: full = P * u + offset, with x_e solved out.
MatrixXq free_parametrization(const Face& face, int e) {
  const int n = face.ambient();
  MatrixXq p = MatrixXq::Zero(n, n - 1);
  int col = 0;
  for (int k = 0; k < n; ++k) {
    if (k == e) continue;
    p(k, col) = 1;
    if (k < face.p_plus_1()) p(e, col) = Rational(-face.b[k]) / face.b[e];
    ++col;
  }
  return p;
}

}  // namespace

LimitMeasure pushforward(const LimitMeasure& measure, const RetractionMap& retraction) {
  if (measure.complex_key != retraction.source_key)
    throw ValidationError("retraction does not start on the complex carrying the measure");
  std::map<StratumKey, MeasureComponent> out;
  for (const auto& c : measure.components) {
    auto it = retraction.faces.find(c.face.key);
    if (it == retraction.faces.end())
      throw ValidationError("retraction has no map on face " + to_string(c.face.key));
    const FaceMap& fm = it->second;
    if (fm.target.dim() != c.face.dim())
      throw ValidationError("retraction collapses face " + to_string(c.face.key) + " onto " +
                            to_string(fm.target.key));
    const int d = c.face.dim();
    Rational det = 1;
    if (d > 0) {
      MatrixXq a = fm.matrix * free_parametrization(c.face, c.eliminated);
      MatrixXq sel(d, d);
      int row = 0;
      for (int k = 0; k < fm.target.ambient(); ++k) {
        if (k == 0) continue;
        sel.row(row++) = a.row(k);
      }
      det = sel.fullPivLu().determinant();
    }
    if (det == 0)
      throw ValidationError("retraction collapses face " + to_string(c.face.key) + " onto " + to_string(fm.target.key));
    double density = c.density / std::abs(to_double(det));
    auto jt = out.find(fm.target.key);
    if (jt == out.end()) {
      MeasureComponent t;
      t.face = fm.target;
      t.density = density;
      t.residue_mass = density * static_cast<double>(fm.target.b[0]);
      t.eliminated = 0;
      out.emplace(fm.target.key, std::move(t));
    } else if (std::abs(jt->second.density - density) > 1e-12 * std::max(1.0, std::abs(density))) {
      throw ValidationError("pieces over " + to_string(fm.target.key) + " induce different densities");
    }
  }
  LimitMeasure m;
  m.complex_key = retraction.target_key;
  m.d = measure.d;
  for (auto& [key, comp] : out) m.components.push_back(std::move(comp));
  return m;
}

ResidueMassTable pullback_masses(const ResidueMassTable& masses, const RetractionMap& retraction,
                                 const WeightProfile& source_profile, const DualComplex& source) {
  if (source.fingerprint() != retraction.source_key)
    throw ValidationError("retraction does not start on the given complex");
  ResidueMassTable out;
  for (const auto& key : source_profile.essential_faces) {
    const Face& f = source.face(key);
    if (f.dim() != source_profile.d) continue;
    auto it = retraction.faces.find(f.key);
    if (it == retraction.faces.end()) throw ValidationError("retraction has no map on face " + to_string(f.key));
    auto mt = masses.find(it->second.target.key);
    if (mt == masses.end())
      throw ValidationError("no residue mass for " + to_string(it->second.target.key) + " under " + to_string(f.key));
    out[f.key] = mt->second;
  }
  return out;
}

}  // namespace degen

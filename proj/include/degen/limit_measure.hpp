#pragma once

#include "degen/dual_complex.hpp"
#include "degen/test_function.hpp"
#include "degen/tower.hpp"
#include "degen/weights.hpp"

#include <map>
#include <string>
#include <vector>

namespace degen {

using ResidueMassTable = std::map<StratumKey, double>;

struct MeasureComponent {
  Face face;
  double residue_mass = 0.0;
  double density = 0.0;  // residue_mass / b_e in coordinates without x_e
  int eliminated = 0;
};

/// Sum over the maximal faces of the essential subcomplex of
/// residue_mass * b_sigma^-1 * lambda_sigma.
struct LimitMeasure {
  std::string complex_key;
  int d = 0;
  std::vector<MeasureComponent> components;
};

/// Masses must be keyed by exactly the d-dimensional essential faces.
LimitMeasure build_limit_measure(const WeightProfile& profile, const DualComplex& complex,
                                 const ResidueMassTable& masses);

double integrate_limit(const LimitMeasure& measure, const TestFunction& f);

/// Pushes the measure forward along a retraction whose source carries it.
/// Pieces landing on one target face must agree on the induced density.
LimitMeasure pushforward(const LimitMeasure& measure, const RetractionMap& retraction);

/// Gives each d-dimensional face of the source the mass of the target face
/// it maps onto.
ResidueMassTable pullback_masses(const ResidueMassTable& masses, const RetractionMap& retraction,
                                 const WeightProfile& source_profile, const DualComplex& source);

}  // namespace degen

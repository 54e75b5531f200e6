#pragma once

#include "degen/dual_complex.hpp"
#include "degen/model.hpp"
#include "degen/test_function.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace degen {

/// Linear map from the full coordinates of one face into another:
/// target_point = matrix * source_point.
struct FaceMap {
  Face source;
  Face target;
  MatrixXq matrix;

  VectorXq apply(const VectorXq& point) const { return matrix * point; }
};

/// Retraction between dual complexes given face by face on the source.
struct RetractionMap {
  std::string source_key;
  std::string target_key;
  std::map<StratumKey, FaceMap> faces;

  static RetractionMap identity(const DualComplex& complex);
};

struct BlowupRecord {
  StratumKey center;
  VerticalComponent new_vertical;
  std::vector<StratumKey> replaced;
  bool point_center = false;
  int codim = 0;
};

struct BlowupResult {
  ModelData model;
  RetractionMap retraction;
  BlowupRecord record;
};

/// Blows up the closure of a stratum. The new component has
/// b' = sum_I b_i and a' = sum_I a_i + sum_J (1 - beta_j); every stratum
/// inside the center is replaced by the star subdivision at the new vertex.
/// An empty `new_id` picks E<k> for the smallest unused k.
BlowupResult blowup_at_stratum(const ModelData& model, const StratumKey& center, std::string new_id = {});

/// Blows up a point of codimension `codim` lying in general position on the
/// host stratum. Nothing is replaced; the new vertex is joined to the host
/// face and its edge collapses under the retraction. The log discrepancy
/// codim - |I| - |J| of the center enters a'.
BlowupResult blowup_at_point(const ModelData& model, const StratumKey& host, int codim, std::string new_id = {},
                             std::string label = {});

std::pair<StratumKey, VectorXq> retraction_apply(const RetractionMap& map, const StratumKey& face,
                                                 const VectorXq& point);

/// The unique source point mapping to `point`, on the smallest source face
/// containing it. Only meaningful for subdivisions.
std::pair<StratumKey, VectorXq> retraction_preimage(const RetractionMap& map, const StratumKey& target_face,
                                                    const VectorXq& point);

/// outer after inner: first apply inner, then outer.
RetractionMap compose(const RetractionMap& outer, const RetractionMap& inner);

/// Moves a point to the smallest face containing it by dropping zero
/// coordinates.
std::pair<StratumKey, VectorXq> canonical_point(const DualComplex& complex, const StratumKey& face,
                                                const VectorXq& point);

/// f composed with the retraction, as a test function on the source complex.
TestFunction pullback(const TestFunction& f, const RetractionMap& map, const DualComplex& source);

}  // namespace degen

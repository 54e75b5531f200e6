#pragma once

#include "degen/model.hpp"
#include "degen/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace degen {

class FaceFunction;

/// The polyhedron {(x, y) >= 0 : sum_i b_i x_i = 1} attached to one stratum.
///
/// Coordinates are ordered as the stratum key lists its components: all
/// verticals first (x_0..x_p), then horizontals (y_1..y_q).
struct Face {
  StratumKey key;
  std::vector<std::int64_t> b;
  std::vector<Rational> a;
  std::vector<Rational> beta;
  std::int64_t b_sigma = 1;

  int p_plus_1() const { return static_cast<int>(b.size()); }
  int q() const { return static_cast<int>(beta.size()); }
  int dim() const { return p_plus_1() - 1 + q(); }
  int ambient() const { return p_plus_1() + q(); }
  bool bounded() const { return beta.empty(); }

  std::vector<std::string> coordinate_ids() const;
  std::optional<int> coordinate_index(const std::string& id) const;

  bool contains(const VectorXq& point) const;
  bool contains(const VectorX<double>& point, double tol) const;
  void require_contains(const VectorXq& point) const;
};

/// Builds a face directly from multiplicities and coefficients; component ids
/// default to x0.. and y1.. when none are given.
Face make_face(std::vector<std::int64_t> b, std::vector<Rational> a, std::vector<Rational> beta,
               StratumKey key = {});

/// The coordinate injection of a face of sigma_to into sigma_to, sending the
/// extra coordinates to 0.
struct Attachment {
  std::size_t from = 0;  // index of the smaller face (the larger stratum)
  std::size_t to = 0;    // index of the larger face
  std::vector<int> embedding;  // embedding[k] = coordinate of `to` receiving coordinate k of `from`
  int to_ambient = 0;

  MatrixXq matrix() const;
  VectorXq apply(const VectorXq& point) const;
};

class DualComplex {
 public:
  DualComplex() = default;

  const ModelData& model() const { return model_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Attachment>& attachments() const { return attachments_; }
  const std::string& fingerprint() const { return fingerprint_; }

  std::optional<std::size_t> index_of(const StratumKey& key) const;
  const Face& face(const StratumKey& key) const;

  /// Faces of face i other than itself (strata containing stratum i).
  const std::vector<std::size_t>& faces_of(std::size_t i) const { return ancestors_[i]; }
  /// Faces having face i as a proper face.
  const std::vector<std::size_t>& cofaces_of(std::size_t i) const { return descendants_[i]; }
  /// Codimension-one faces of face i.
  const std::vector<std::size_t>& facets_of(std::size_t i) const { return parents_[i]; }

  const Attachment& attachment(std::size_t from, std::size_t to) const;

  /// The face of face i spanned by the given coordinate ids, if present.
  std::optional<std::size_t> subface(std::size_t i, const std::vector<std::string>& verticals,
                                     const std::vector<std::string>& horizontals) const;

 private:
  friend DualComplex build_complex(const ModelData& model);

  ModelData model_;
  std::vector<Face> faces_;
  std::map<StratumKey, std::size_t> index_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> ancestors_;
  std::vector<std::vector<std::size_t>> descendants_;
  std::vector<Attachment> attachments_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> attachment_index_;
  std::string fingerprint_;
};

/// Validates the model and assembles faces and attachments.
///
/// Containment comes from each stratum's explicit parent list. A stratum
/// without one gets as parents the strata whose index sets drop exactly one
/// component, provided each such index set names a single stratum.
DualComplex build_complex(const ModelData& model);

/// Density b_sigma / b_e of the normalized Lebesgue measure in the
/// coordinates left after solving the constraint for x_e.
Rational lebesgue_density(const Face& face, int eliminated_index = 0);

/// Size of the image of alpha -> sum_{i>=1} b_i alpha_i in Z/b_0, found by
/// enumerating the reachable residues.
std::int64_t lattice_index_oracle(std::span<const std::int64_t> b);

/// density * integral of f over the face in the free coordinates left after
/// eliminating x_e.
double integrate_on_face(const Face& face, const Rational& density, const FaceFunction& f,
                         int eliminated_index = 0);

}  // namespace degen

#pragma once

#include "degen/rational.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace degen {

/// A component E_i of the central fiber, with multiplicity b_i and the
/// coefficient a_i of -E_i in the line bundle extension.
struct VerticalComponent {
  std::string id;
  std::int64_t b = 1;
  Rational a{0};
};

/// A boundary component B_j with coefficient beta_j.
struct HorizontalComponent {
  std::string id;
  Rational beta{0};
};

/// Identifies a stratum: the components it lies on plus a label that
/// separates connected components of the same intersection.
struct StratumKey {
  std::vector<std::string> verticals;
  std::vector<std::string> horizontals;
  std::string label;

  auto operator<=>(const StratumKey&) const = default;
  bool operator==(const StratumKey&) const = default;
};

std::string to_string(const StratumKey& key);

struct Stratum {
  StratumKey key;
  /// Strata that contain this one. When absent, immediate parents are
  /// inferred from index sets, which must then be unambiguous.
  std::optional<std::vector<StratumKey>> parents;
};

/// Combinatorial stand-in for an snc model: components plus its strata.
struct ModelData {
  std::string name;
  std::vector<VerticalComponent> verticals;
  std::vector<HorizontalComponent> horizontals;
  std::vector<Stratum> strata;

  std::optional<std::size_t> vertical_index(const std::string& id) const;
  std::optional<std::size_t> horizontal_index(const std::string& id) const;
  const VerticalComponent& vertical(const std::string& id) const;
  const HorizontalComponent& horizontal(const std::string& id) const;
};

/// Orders a key's component ids by their listing order in the model and
/// rejects unknown or repeated ids.
StratumKey canonical_key(const ModelData& model, const StratumKey& key);

/// Deterministic fingerprint of the model's combinatorics, used to tie
/// retraction maps and measures to the complex they live on.
std::string model_fingerprint(const ModelData& model);

}  // namespace degen

#include "degen/examples.hpp"

#include "degen/errors.hpp"

namespace degen {

namespace {

StratumKey key(std::vector<std::string> v, std::vector<std::string> h = {}) {
  return StratumKey{std::move(v), std::move(h), ""};
}

Factor along(int n, int coord, const Piecewise1D& profile) {
  LinearForm form{VectorX<double>::Zero(n), 0.0};
  form.coeffs[coord] = 1.0;
  return Factor{form, profile};
}

// Fan model: one vertical E0 with b = 1, a = 0 and rays given by horizontals of coefficient 1.
BuiltinExample fan_example(std::string name, std::string description, std::vector<std::string> rays, int max_cone) {
  BuiltinExample ex;
  ex.name = std::move(name);
  ex.description = std::move(description);
  ex.model.name = ex.name;
  ex.model.verticals = {{"E0", 1, Rational(0)}};
  for (const auto& r : rays) ex.model.horizontals.push_back({r, Rational(1)});
  ex.model.strata.push_back({key({"E0"}), std::nullopt});
  const int n = static_cast<int>(rays.size());
  std::vector<std::vector<std::string>> cones;
  for (int i = 0; i < n; ++i) cones.push_back({rays[i]});
  if (max_cone == 2)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) cones.push_back({rays[i], rays[j]});
  for (const auto& c : cones) ex.model.strata.push_back({key({"E0"}, c), std::nullopt});

  ex.expected.kappa["E0"] = 0;
  ex.expected.kappa_min = 0;
  ex.expected.d = max_cone;
  ex.expected.essential_faces.insert(key({"E0"}));
  for (const auto& c : cones) {
    ex.expected.essential_faces.insert(key({"E0"}, c));
    if (static_cast<int>(c.size()) == max_cone) ex.masses[key({"E0"}, c)] = 1.0;
  }

  // unit hat of the l^1 distance to the vertex, identical on every cone
  auto hat = Piecewise1D::hat(-1.0, 1.0);
  for (const auto& c : cones) {
    if (static_cast<int>(c.size()) != max_cone) continue;
    const int amb = 1 + max_cone;
    LinearForm form{VectorX<double>::Zero(amb), 0.0};
    for (int j = 0; j < max_cone; ++j) form.coeffs[1 + j] = 1.0;
    std::vector<std::string> coords{"E0"};
    coords.insert(coords.end(), c.begin(), c.end());
    ex.test_function[key({"E0"}, c)] = FaceFunction(coords, {Term{1.0, {Factor{form, hat}}}});
  }

  for (const auto& c : cones) {
    if (static_cast<int>(c.size()) != max_cone) continue;
    ExampleChart ch;
    ch.face = key({"E0"}, c);
    ch.chart.b = {1};
    ch.chart.a = {Rational(0)};
    ch.chart.beta.assign(c.size(), Rational(1));
    ch.chart.residue_weight = 1.0;
    const int amb = 1 + max_cone;
    std::vector<std::string> coords{"x0"};
    std::vector<Factor> factors;
    for (int j = 0; j < max_cone; ++j) {
      coords.push_back("y" + std::to_string(j + 1));
      factors.push_back(along(amb, 1 + j, Piecewise1D::hat(0.0, 2.0)));  // unit area
    }
    ch.f = FaceFunction(coords, {Term{1.0, factors}});
    ex.charts.push_back(std::move(ch));
  }
  return ex;
}

BuiltinExample node_example() {
  BuiltinExample ex;
  ex.name = "node";
  ex.description = "two components E0, E1 of multiplicity 1 meeting in a node; the skeleton is a segment";
  ex.model.name = ex.name;
  ex.model.verticals = {{"E0", 1, Rational(0)}, {"E1", 1, Rational(0)}};
  ex.model.strata = {{key({"E0"}), std::nullopt}, {key({"E1"}), std::nullopt}, {key({"E0", "E1"}), std::nullopt}};
  ex.expected.kappa = {{"E0", Rational(0)}, {"E1", Rational(0)}};
  ex.expected.kappa_min = 0;
  ex.expected.d = 1;
  ex.expected.essential_faces = {key({"E0"}), key({"E1"}), key({"E0", "E1"})};
  ex.masses[key({"E0", "E1"})] = 1.0;
  ex.test_function[key({"E0", "E1"})] =
      FaceFunction({"E0", "E1"}, {Term{1.0, {along(2, 1, Piecewise1D::bump(0.2, 0.8))}}});

  ExampleChart ch;
  ch.face = key({"E0", "E1"});
  ch.chart.b = {1, 1};
  ch.chart.a = {Rational(0), Rational(0)};
  ch.chart.residue_weight = 1.0;
  ch.f = FaceFunction({"x0", "x1"}, {Term{1.0, {along(2, 1, Piecewise1D::bump(0.2, 0.8))}}});
  ex.charts.push_back(std::move(ch));
  return ex;
}

}  // namespace

std::vector<BuiltinExample> builtin_examples() {
  return {
      fan_example("p1", "P^1 x disc with boundary 0 + infinity; the dual complex is a line", {"B1", "B2"}, 1),
      fan_example("torus", "rank-one torus with its fan model; the skeleton is N_R = R", {"Bp", "Bm"}, 1),
      fan_example("torus2", "rank-two torus with the fan of P^2; the skeleton is N_R = R^2", {"B1", "B2", "B3"}, 2),
      node_example(),
  };
}

const BuiltinExample& builtin_example(std::string_view name) {
  static const std::vector<BuiltinExample> all = builtin_examples();
  for (const auto& ex : all)
    if (ex.name == name) return ex;
  throw ValidationError("unknown builtin example '" + std::string(name) + "'");
}

}  // namespace degen

#pragma once

#include "degen/limit_measure.hpp"
#include "degen/local_model.hpp"
#include "degen/model.hpp"
#include "degen/test_function.hpp"
#include "degen/weights.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace degen {

struct ExampleChart {
  StratumKey face;  // the face of the model the chart is adapted to
  LocalChart chart;
  FaceFunction f;   // test function in chart coordinates
};

struct BuiltinExample {
  std::string name;
  std::string description;
  ModelData model;
  std::vector<ExampleChart> charts;
  WeightProfile expected;
  ResidueMassTable masses;
  std::map<StratumKey, FaceFunction> test_function;  // listed faces on the model's complex
};

/// p1 (P^1 x disc with boundary 0 + infinity), torus (rank-one fan), torus2
/// (fan of P^2) and node (two components meeting in a point).
std::vector<BuiltinExample> builtin_examples();
const BuiltinExample& builtin_example(std::string_view name);

}  // namespace degen

#pragma once

#include "degen/dual_complex.hpp"
#include "degen/limit_measure.hpp"
#include "degen/local_model.hpp"
#include "degen/model.hpp"
#include "degen/test_function.hpp"
#include "degen/tower.hpp"
#include "degen/weights.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace degen {

using Json = nlohmann::ordered_json;

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

Rational rational_from_json(const Json& j, const std::string& field);
Json rational_to_json(const Rational& r);

StratumKey key_from_json(const Json& j);
Json key_to_json(const StratumKey& key);

ModelData model_from_json(const Json& j);
Json model_to_json(const ModelData& model);

LocalChart chart_from_json(const Json& j);
Json chart_to_json(const LocalChart& chart);

/// {"terms": [...]} over the given coordinate names.
FaceFunction face_function_from_json(const Json& j, const std::vector<std::string>& coords);
Json face_function_to_json(const FaceFunction& f);

/// {"faces": [{"face": key, "terms": [...]}, ...]}
TestFunction test_function_from_json(const Json& j, const DualComplex& complex);

ResidueMassTable masses_from_json(const Json& j);
Json masses_to_json(const ResidueMassTable& masses);

Json profile_to_json(const WeightProfile& profile);
Json measure_to_json(const LimitMeasure& measure);
Json retraction_to_json(const RetractionMap& map);
Json record_to_json(const BlowupRecord& record);

/// Shortest text that round-trips the double.
std::string format_double(double v);

}  // namespace degen

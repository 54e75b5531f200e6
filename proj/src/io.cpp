#include "degen/io.hpp"

#include "degen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace degen {

namespace {

const Json& require(const Json& j, const char* field, const std::string& where) {
  if (!j.is_object() || !j.contains(field)) throw ValidationError(where + ": missing field '" + field + "'");
  return j.at(field);
}

double number_from_json(const Json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    try {
      return to_double(parse_rational(s));
    } catch (const std::exception&) {
    }
  }
  throw ValidationError(field + ": expected a number");
}

std::vector<std::string> string_list(const Json& j, const std::string& where) {
  std::vector<std::string> out;
  if (j.is_null()) return out;
  if (!j.is_array()) throw ValidationError(where + ": expected a list of ids");
  for (const auto& s : j) {
    if (!s.is_string()) throw ValidationError(where + ": ids must be strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

Piecewise1D profile_from_json(const Json& j) {
  const auto type = require(j, "type", "profile").get<std::string>();
  const double height = j.contains("height") ? number_from_json(j.at("height"), "height") : 1.0;
  auto num = [&](const char* f) { return number_from_json(require(j, f, "profile"), f); };
  if (type == "hat") return Piecewise1D::hat(num("left"), num("right"), height);
  if (type == "bump") return Piecewise1D::bump(num("left"), num("right"), height);
  if (type == "trapezoid") return Piecewise1D::trapezoid(num("a"), num("b"), num("c"), num("d"), height);
  if (type == "piecewise") {
    std::vector<double> breaks;
    for (const auto& b : require(j, "breaks", "profile")) breaks.push_back(number_from_json(b, "breaks"));
    std::vector<std::vector<double>> pieces;
    for (const auto& p : require(j, "pieces", "profile")) {
      std::vector<double> c;
      for (const auto& v : p) c.push_back(number_from_json(v, "pieces"));
      pieces.push_back(std::move(c));
    }
    return Piecewise1D(std::move(breaks), std::move(pieces));
  }
  throw ValidationError("profile: unknown type '" + type + "'");
}

Json profile_to_json(const Piecewise1D& p) {
  Json j;
  j["type"] = "piecewise";
  j["breaks"] = p.breaks();
  j["pieces"] = p.pieces();
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

Rational rational_from_json(const Json& j, const std::string& field) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number()) return parse_rational(j.dump());
  } catch (const ValidationError& e) {
    throw ValidationError(field + ": " + e.what());
  }
  throw ValidationError(field + ": expected a rational such as \"3/2\"");
}

Json rational_to_json(const Rational& r) { return to_string(r); }

StratumKey key_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("face key must be an object");
  StratumKey k;
  k.verticals = string_list(j.value("verticals", Json::array()), "verticals");
  k.horizontals = string_list(j.value("horizontals", Json::array()), "horizontals");
  if (j.contains("label") && !j.at("label").is_null()) k.label = j.at("label").get<std::string>();
  return k;
}

Json key_to_json(const StratumKey& key) {
  return Json{{"verticals", key.verticals}, {"horizontals", key.horizontals}, {"label", key.label}};
}

ModelData model_from_json(const Json& j) {
  ModelData m;
  if (!j.is_object()) throw ValidationError("model document must be an object");
  m.name = j.value("name", "");
  for (const auto& v : require(j, "verticals", "model")) {
    VerticalComponent c;
    c.id = require(v, "id", "vertical").get<std::string>();
    Rational b = rational_from_json(require(v, "b", "vertical " + c.id), "vertical " + c.id + " b");
    if (denominator(b) != 1) throw ValidationError("vertical " + c.id + ": b must be an integer");
    c.b = numerator(b).convert_to<std::int64_t>();
    c.a = v.contains("a") ? rational_from_json(v.at("a"), "vertical " + c.id + " a") : Rational(0);
    m.verticals.push_back(std::move(c));
  }
  if (j.contains("horizontals"))
    for (const auto& h : j.at("horizontals")) {
      HorizontalComponent c;
      c.id = require(h, "id", "horizontal").get<std::string>();
      c.beta = rational_from_json(require(h, "beta", "horizontal " + c.id), "horizontal " + c.id + " beta");
      m.horizontals.push_back(std::move(c));
    }
  for (const auto& s : require(j, "strata", "model")) {
    Stratum st{key_from_json(s), std::nullopt};
    if (s.contains("parents") && !s.at("parents").is_null()) {
      st.parents = std::vector<StratumKey>{};
      for (const auto& p : s.at("parents")) st.parents->push_back(key_from_json(p));
    }
    m.strata.push_back(std::move(st));
  }
  return m;
}

Json model_to_json(const ModelData& model) {
  Json j;
  j["name"] = model.name;
  j["verticals"] = Json::array();
  for (const auto& v : model.verticals)
    j["verticals"].push_back({{"id", v.id}, {"b", std::to_string(v.b)}, {"a", to_string(v.a)}});
  j["horizontals"] = Json::array();
  for (const auto& h : model.horizontals) j["horizontals"].push_back({{"id", h.id}, {"beta", to_string(h.beta)}});
  j["strata"] = Json::array();
  for (const auto& s : model.strata) {
    Json e = key_to_json(s.key);
    if (s.parents) {
      e["parents"] = Json::array();
      for (const auto& p : *s.parents) e["parents"].push_back(key_to_json(p));
    }
    j["strata"].push_back(std::move(e));
  }
  return j;
}

LocalChart chart_from_json(const Json& j) {
  LocalChart c;
  for (const auto& b : require(j, "b", "chart")) {
    Rational r = rational_from_json(b, "chart b");
    if (denominator(r) != 1) throw ValidationError("chart b: multiplicities must be integers");
    c.b.push_back(numerator(r).convert_to<std::int64_t>());
  }
  if (j.contains("a"))
    for (const auto& a : j.at("a")) c.a.push_back(rational_from_json(a, "chart a"));
  else
    c.a.assign(c.b.size(), Rational(0));
  if (j.contains("beta"))
    for (const auto& b : j.at("beta")) c.beta.push_back(rational_from_json(b, "chart beta"));
  if (j.contains("residue_weight")) c.residue_weight = number_from_json(j.at("residue_weight"), "residue_weight");
  if (j.contains("kappa_min")) c.kappa_min = rational_from_json(j.at("kappa_min"), "kappa_min");
  if (j.contains("d")) c.d = j.at("d").get<int>();
  validate_chart(c);
  return c;
}

Json chart_to_json(const LocalChart& chart) {
  Json j;
  j["b"] = Json::array();
  for (auto b : chart.b) j["b"].push_back(std::to_string(b));
  j["a"] = Json::array();
  for (const auto& a : chart.a) j["a"].push_back(to_string(a));
  j["beta"] = Json::array();
  for (const auto& b : chart.beta) j["beta"].push_back(to_string(b));
  j["residue_weight"] = chart.residue_weight;
  if (chart.kappa_min) j["kappa_min"] = to_string(*chart.kappa_min);
  if (chart.d) j["d"] = *chart.d;
  return j;
}

FaceFunction face_function_from_json(const Json& j, const std::vector<std::string>& coords) {
  const int n = static_cast<int>(coords.size());
  std::vector<Term> terms;
  for (const auto& t : require(j, "terms", "test function")) {
    Term term;
    term.coeff = t.contains("coeff") ? number_from_json(t.at("coeff"), "coeff") : 1.0;
    if (t.contains("factors"))
      for (const auto& f : t.at("factors")) {
        Factor fac;
        fac.form.coeffs = VectorX<double>::Zero(n);
        auto set = [&](const std::string& id, double v) {
          auto it = std::find(coords.begin(), coords.end(), id);
          if (it == coords.end()) throw ValidationError("test function: unknown coordinate '" + id + "'");
          fac.form.coeffs[it - coords.begin()] += v;
        };
        if (f.contains("var")) set(f.at("var").get<std::string>(), 1.0);
        if (f.contains("coeffs"))
          for (const auto& [id, v] : f.at("coeffs").items()) set(id, number_from_json(v, "coeffs"));
        if (f.contains("const")) fac.form.constant = number_from_json(f.at("const"), "const");
        if (f.contains("profile")) fac.profile = profile_from_json(f.at("profile"));
        term.factors.push_back(std::move(fac));
      }
    terms.push_back(std::move(term));
  }
  return FaceFunction(coords, std::move(terms));
}

Json face_function_to_json(const FaceFunction& f) {
  Json j;
  j["terms"] = Json::array();
  for (const auto& t : f.terms()) {
    Json term{{"coeff", t.coeff}, {"factors", Json::array()}};
    for (const auto& fac : t.factors) {
      Json jf;
      Json coeffs = Json::object();
      for (int k = 0; k < f.ambient(); ++k)
        if (fac.form.coeffs[k] != 0.0) coeffs[f.coords()[k]] = fac.form.coeffs[k];
      jf["coeffs"] = coeffs;
      jf["const"] = fac.form.constant;
      if (fac.profile) jf["profile"] = profile_to_json(*fac.profile);
      term["factors"].push_back(std::move(jf));
    }
    j["terms"].push_back(std::move(term));
  }
  return j;
}

TestFunction test_function_from_json(const Json& j, const DualComplex& complex) {
  std::map<StratumKey, FaceFunction> listed;
  for (const auto& e : require(j, "faces", "test function")) {
    auto key = key_from_json(require(e, "face", "test function face"));
    const Face& face = complex.face(key);
    if (listed.count(face.key)) throw ValidationError("test function lists face " + to_string(face.key) + " twice");
    listed[face.key] = face_function_from_json(e, face.coordinate_ids());
  }
  return TestFunction(complex, std::move(listed));
}

ResidueMassTable masses_from_json(const Json& j) {
  const Json& list = j.is_object() ? require(j, "masses", "mass table") : j;
  if (!list.is_array()) throw ValidationError("mass table must be a list of {face, mass}");
  ResidueMassTable t;
  for (const auto& e : list) {
    auto key = key_from_json(require(e, "face", "mass entry"));
    if (t.count(key)) throw ValidationError("mass table lists " + to_string(key) + " twice");
    t[key] = number_from_json(require(e, "mass", "mass entry"), "mass");
  }
  return t;
}

Json masses_to_json(const ResidueMassTable& masses) {
  Json j = Json::array();
  for (const auto& [k, m] : masses) j.push_back({{"face", key_to_json(k)}, {"mass", format_double(m)}});
  return j;
}

Json profile_to_json(const WeightProfile& profile) {
  Json j;
  j["kappa"] = Json::object();
  for (const auto& [id, k] : profile.kappa) j["kappa"][id] = to_string(k);
  j["kappa_min"] = to_string(profile.kappa_min);
  j["essential_faces"] = Json::array();
  for (const auto& k : profile.essential_faces) j["essential_faces"].push_back(key_to_json(k));
  j["d"] = profile.d;
  return j;
}

Json measure_to_json(const LimitMeasure& measure) {
  Json j;
  j["complex"] = measure.complex_key;
  j["d"] = measure.d;
  j["components"] = Json::array();
  for (const auto& c : measure.components)
    j["components"].push_back({{"face", key_to_json(c.face.key)},
                               {"b_sigma", c.face.b_sigma},
                               {"eliminated", c.face.key.verticals[c.eliminated]},
                               {"residue_mass", c.residue_mass},
                               {"density", c.density}});
  return j;
}

Json retraction_to_json(const RetractionMap& map) {
  Json j;
  j["source"] = map.source_key;
  j["target"] = map.target_key;
  j["faces"] = Json::array();
  for (const auto& [key, fm] : map.faces) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < fm.matrix.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < fm.matrix.cols(); ++c) row.push_back(to_string(fm.matrix(r, c)));
      rows.push_back(std::move(row));
    }
    j["faces"].push_back({{"source", key_to_json(fm.source.key)},
                          {"target", key_to_json(fm.target.key)},
                          {"source_coords", fm.source.coordinate_ids()},
                          {"target_coords", fm.target.coordinate_ids()},
                          {"matrix", rows}});
  }
  return j;
}

Json record_to_json(const BlowupRecord& record) {
  Json j;
  j["center"] = key_to_json(record.center);
  j["point_center"] = record.point_center;
  j["codim"] = record.codim;
  j["new_vertical"] = {{"id", record.new_vertical.id},
                       {"b", std::to_string(record.new_vertical.b)},
                       {"a", to_string(record.new_vertical.a)}};
  j["replaced"] = Json::array();
  for (const auto& k : record.replaced) j["replaced"].push_back(key_to_json(k));
  return j;
}

}  // namespace degen

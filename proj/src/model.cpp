#include "degen/model.hpp"

#include "degen/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace degen {

std::string to_string(const StratumKey& key) {
  std::string out = "{";
  for (std::size_t i = 0; i < key.verticals.size(); ++i) {
    if (i) out += ",";
    out += key.verticals[i];
  }
  out += "|";
  for (std::size_t j = 0; j < key.horizontals.size(); ++j) {
    if (j) out += ",";
    out += key.horizontals[j];
  }
  out += "}";
  if (!key.label.empty()) out += "#" + key.label;
  return out;
}

std::optional<std::size_t> ModelData::vertical_index(const std::string& id) const {
  for (std::size_t i = 0; i < verticals.size(); ++i)
    if (verticals[i].id == id) return i;
  return std::nullopt;
}

std::optional<std::size_t> ModelData::horizontal_index(const std::string& id) const {
  for (std::size_t j = 0; j < horizontals.size(); ++j)
    if (horizontals[j].id == id) return j;
  return std::nullopt;
}

const VerticalComponent& ModelData::vertical(const std::string& id) const {
  auto i = vertical_index(id);
  if (!i) throw ValidationError("unknown vertical component '" + id + "'");
  return verticals[*i];
}

const HorizontalComponent& ModelData::horizontal(const std::string& id) const {
  auto j = horizontal_index(id);
  if (!j) throw ValidationError("unknown horizontal component '" + id + "'");
  return horizontals[*j];
}

StratumKey canonical_key(const ModelData& model, const StratumKey& key) {
  auto order = [&](const std::vector<std::string>& ids, bool vertical) {
    std::vector<std::pair<std::size_t, std::string>> indexed;
    for (const auto& id : ids) {
      auto idx = vertical ? model.vertical_index(id) : model.horizontal_index(id);
      if (!idx)
        throw ValidationError("stratum " + to_string(key) + " references unknown " +
                              (vertical ? "vertical" : "horizontal") + " component '" + id + "'");
      indexed.emplace_back(*idx, id);
    }
    std::sort(indexed.begin(), indexed.end());
    for (std::size_t k = 1; k < indexed.size(); ++k)
      if (indexed[k].first == indexed[k - 1].first)
        throw ValidationError("stratum " + to_string(key) + " repeats component '" +
                              indexed[k].second + "'");
    std::vector<std::string> out;
    for (auto& [_, id] : indexed) out.push_back(id);
    return out;
  };
  return StratumKey{order(key.verticals, true), order(key.horizontals, false), key.label};
}

std::string model_fingerprint(const ModelData& model) {
  std::string canon;
  for (const auto& v : model.verticals) canon += "V" + v.id + ":" + std::to_string(v.b) + ":" + to_string(v.a) + ";";
  for (const auto& h : model.horizontals) canon += "H" + h.id + ":" + to_string(h.beta) + ";";
  std::set<StratumKey> keys;
  for (const auto& s : model.strata) keys.insert(canonical_key(model, s.key));
  for (const auto& k : keys) canon += "S" + to_string(k) + ";";
  // FNV-1a, 64 bit
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace degen

#include "degen/tower.hpp"

#include "degen/errors.hpp"

#include <algorithm>
#include <set>

namespace degen {

namespace {

std::string fresh_vertical_id(const ModelData& model) {
  for (int k = 0;; ++k) {
    std::string id = "E" + std::to_string(k);
    if (!model.vertical_index(id) && !model.horizontal_index(id)) return id;
  }
}

bool contains_id(const std::vector<std::string>& v, const std::string& id) {
  return std::find(v.begin(), v.end(), id) != v.end();
}

std::vector<std::string> minus(const std::vector<std::string>& v, const std::vector<std::string>& drop) {
  std::vector<std::string> out;
  for (const auto& s : v)
    if (!contains_id(drop, s)) out.push_back(s);
  return out;
}

// Index set of a key as a flat id list: verticals then horizontals.
std::vector<std::string> flat(const StratumKey& k) {
  auto out = k.verticals;
  out.insert(out.end(), k.horizontals.begin(), k.horizontals.end());
  return out;
}

StratumKey key_without(const ModelData& model, const StratumKey& k, const std::vector<std::string>& drop,
                       const std::string& add_vertical) {
  StratumKey out{minus(k.verticals, drop), minus(k.horizontals, drop), k.label};
  if (!add_vertical.empty()) out.verticals.push_back(add_vertical);
  return canonical_key(model, out);
}

// The ancestor (or self) of face i whose index set is `ids`.
std::optional<std::size_t> ancestor_with(const DualComplex& cx, std::size_t i, const std::vector<std::string>& ids) {
  std::vector<std::string> v, h;
  for (const auto& id : ids) (cx.model().vertical_index(id) ? v : h).push_back(id);
  if (v.empty()) return std::nullopt;
  return cx.subface(i, v, h);
}

// Matrix of the map (C \ S) + R + {E'} -> C + R that adds x' to every
// coordinate of the center.
MatrixXq star_matrix(const Face& source, const Face& target, const std::vector<std::string>& center,
                     const std::string& new_id) {
  MatrixXq m = MatrixXq::Zero(target.ambient(), source.ambient());
  const int xnew = *source.coordinate_index(new_id);
  auto ids = target.coordinate_ids();
  for (int k = 0; k < target.ambient(); ++k) {
    if (auto s = source.coordinate_index(ids[k])) m(k, *s) = 1;
    if (contains_id(center, ids[k])) m(k, xnew) = 1;
  }
  return m;
}

struct NewStratum {
  StratumKey key;
  std::vector<StratumKey> parents;
  std::size_t target;  // face index in the old complex
};

BlowupResult assemble(const ModelData& model, const DualComplex& cx, VerticalComponent nv,
                      const std::set<std::size_t>& removed, const std::vector<NewStratum>& added,
                      const std::vector<std::string>& center, BlowupRecord record) {
  BlowupResult res;
  res.model = model;
  res.model.verticals.push_back(nv);
  res.model.strata.clear();
  for (std::size_t i = 0; i < cx.faces().size(); ++i) {
    if (removed.count(i)) continue;
    Stratum s{cx.faces()[i].key, std::vector<StratumKey>{}};
    for (auto p : cx.facets_of(i)) s.parents->push_back(cx.faces()[p].key);
    res.model.strata.push_back(std::move(s));
  }
  for (const auto& n : added) res.model.strata.push_back(Stratum{n.key, n.parents});

  DualComplex ncx = build_complex(res.model);
  res.retraction.source_key = ncx.fingerprint();
  res.retraction.target_key = cx.fingerprint();
  for (std::size_t i = 0; i < cx.faces().size(); ++i) {
    if (removed.count(i)) continue;
    const Face& f = cx.faces()[i];
    res.retraction.faces[f.key] = FaceMap{ncx.face(f.key), f, MatrixXq::Identity(f.ambient(), f.ambient())};
  }
  for (const auto& n : added) {
    const Face& src = ncx.face(n.key);
    const Face& tgt = cx.faces()[n.target];
    res.retraction.faces[src.key] = FaceMap{src, tgt, star_matrix(src, tgt, center, nv.id)};
  }
  record.new_vertical = nv;
  for (auto i : removed) record.replaced.push_back(cx.faces()[i].key);
  res.record = std::move(record);
  return res;
}

}  // namespace

RetractionMap RetractionMap::identity(const DualComplex& complex) {
  RetractionMap r;
  r.source_key = r.target_key = complex.fingerprint();
  for (const auto& f : complex.faces()) r.faces[f.key] = FaceMap{f, f, MatrixXq::Identity(f.ambient(), f.ambient())};
  return r;
}

BlowupResult blowup_at_stratum(const ModelData& model, const StratumKey& center_key, std::string new_id) {
  DualComplex cx = build_complex(model);
  auto yi = cx.index_of(center_key);
  if (!yi) throw ValidationError("blowup center " + to_string(center_key) + " is not a stratum of the model");
  if (cx.faces()[*yi].dim() == 0)
    throw ValidationError("blowup center " + to_string(center_key) + " is a single component; blowing it up changes nothing");
  if (new_id.empty()) new_id = fresh_vertical_id(model);
  if (model.vertical_index(new_id) || model.horizontal_index(new_id))
    throw ValidationError("component id '" + new_id + "' already exists");
  const Face& y = cx.faces()[*yi];
  const auto center = flat(y.key);

  VerticalComponent nv{new_id, 0, Rational(0)};
  for (int i = 0; i < y.p_plus_1(); ++i) {
    nv.b += y.b[i];
    nv.a += y.a[i];
  }
  for (int j = 0; j < y.q(); ++j) nv.a += 1 - y.beta[j];

  ModelData extended = model;
  extended.verticals.push_back(nv);

  std::set<std::size_t> removed{*yi};
  removed.insert(cx.cofaces_of(*yi).begin(), cx.cofaces_of(*yi).end());

  const std::size_t nc = center.size();
  std::vector<NewStratum> added;
  for (auto zi : removed) {
    const Face& z = cx.faces()[zi];
    auto rest = minus(flat(z.key), center);
    for (unsigned mask = 1; mask < (1u << nc); ++mask) {
      std::vector<std::string> s;
      for (std::size_t c = 0; c < nc; ++c)
        if (mask & (1u << c)) s.push_back(center[c]);
      NewStratum n{key_without(extended, z.key, s, new_id), {}, zi};
      for (std::size_t c = 0; c < nc; ++c) {
        if (mask & (1u << c)) continue;
        auto s2 = s;
        s2.push_back(center[c]);
        n.parents.push_back(key_without(extended, z.key, s2, new_id));
      }
      for (const auto& k : rest) {
        auto ids = minus(flat(z.key), {k});
        auto zp = ancestor_with(cx, zi, ids);
        if (zp && removed.count(*zp)) n.parents.push_back(key_without(extended, cx.faces()[*zp].key, s, new_id));
      }
      if (auto old = ancestor_with(cx, zi, minus(flat(z.key), s))) n.parents.push_back(cx.faces()[*old].key);
      added.push_back(std::move(n));
    }
  }
  BlowupRecord record;
  record.center = y.key;
  record.codim = static_cast<int>(nc);
  return assemble(model, cx, nv, removed, added, center, std::move(record));
}

BlowupResult blowup_at_point(const ModelData& model, const StratumKey& host_key, int codim, std::string new_id,
                             std::string label) {
  DualComplex cx = build_complex(model);
  auto hi = cx.index_of(host_key);
  if (!hi) throw ValidationError("host " + to_string(host_key) + " is not a stratum of the model");
  if (new_id.empty()) new_id = fresh_vertical_id(model);
  if (model.vertical_index(new_id) || model.horizontal_index(new_id))
    throw ValidationError("component id '" + new_id + "' already exists");
  if (label.empty()) label = new_id;
  const Face& h = cx.faces()[*hi];
  const auto center = flat(h.key);
  const int nc = static_cast<int>(center.size());
  if (codim <= nc)
    throw ValidationError("a point center needs codimension above the host's " + std::to_string(nc));

  VerticalComponent nv{new_id, 0, Rational(codim - nc)};
  for (int i = 0; i < h.p_plus_1(); ++i) {
    nv.b += h.b[i];
    nv.a += h.a[i];
  }
  for (int j = 0; j < h.q(); ++j) nv.a += 1 - h.beta[j];

  ModelData extended = model;
  extended.verticals.push_back(nv);
  StratumKey base = h.key;
  base.label = label;

  std::vector<NewStratum> added;
  for (unsigned mask = 0; mask < (1u << nc); ++mask) {
    std::vector<std::string> s;
    for (int c = 0; c < nc; ++c)
      if (mask & (1u << c)) s.push_back(center[c]);
    NewStratum n{key_without(extended, base, s, new_id), {}, *hi};
    for (int c = 0; c < nc; ++c) {
      if (mask & (1u << c)) continue;
      auto s2 = s;
      s2.push_back(center[c]);
      n.parents.push_back(key_without(extended, base, s2, new_id));
    }
    if (auto old = ancestor_with(cx, *hi, minus(center, s))) n.parents.push_back(cx.faces()[*old].key);
    added.push_back(std::move(n));
  }
  BlowupRecord record;
  record.center = base;
  record.point_center = true;
  record.codim = codim;
  return assemble(model, cx, nv, {}, added, center, std::move(record));
}

std::pair<StratumKey, VectorXq> retraction_apply(const RetractionMap& map, const StratumKey& face,
                                                 const VectorXq& point) {
  auto it = map.faces.find(face);
  if (it == map.faces.end()) throw ValidationError("retraction has no face " + to_string(face));
  it->second.source.require_contains(point);
  return {it->second.target.key, it->second.apply(point)};
}

std::pair<StratumKey, VectorXq> retraction_preimage(const RetractionMap& map, const StratumKey& target_face,
                                                    const VectorXq& point) {
  const FaceMap* best = nullptr;
  VectorXq best_point;
  for (const auto& [key, fm] : map.faces) {
    if (fm.target.key != target_face) continue;
    if (point.size() != fm.target.ambient()) throw ValidationError("point has the wrong number of coordinates");
    if (best && fm.source.dim() >= best->source.dim()) continue;
    auto lu = fm.matrix.fullPivLu();
    if (lu.rank() < fm.matrix.cols()) continue;
    VectorXq s = lu.solve(point);
    if (fm.matrix * s != point || !fm.source.contains(s)) continue;
    best = &fm;
    best_point = s;
  }
  if (!best) throw ValidationError("point has no preimage over face " + to_string(target_face));
  return {best->source.key, best_point};
}

RetractionMap compose(const RetractionMap& outer, const RetractionMap& inner) {
  if (inner.target_key != outer.source_key)
    throw ValidationError("cannot compose: inner retraction does not end where the outer one starts");
  RetractionMap r;
  r.source_key = inner.source_key;
  r.target_key = outer.target_key;
  for (const auto& [key, fm] : inner.faces) {
    auto it = outer.faces.find(fm.target.key);
    if (it == outer.faces.end()) throw ValidationError("outer retraction has no face " + to_string(fm.target.key));
    r.faces[key] = FaceMap{fm.source, it->second.target, it->second.matrix * fm.matrix};
  }
  return r;
}

std::pair<StratumKey, VectorXq> canonical_point(const DualComplex& complex, const StratumKey& face,
                                                const VectorXq& point) {
  auto idx = complex.index_of(face);
  if (!idx) throw ValidationError("no face for stratum " + to_string(face));
  const Face& f = complex.faces()[*idx];
  f.require_contains(point);
  std::vector<std::string> v, h;
  for (int k = 0; k < f.ambient(); ++k) {
    if (point[k] == 0) continue;
    (k < f.p_plus_1() ? v : h).push_back(f.coordinate_ids()[k]);
  }
  auto sub = complex.subface(*idx, v, h);
  if (!sub) throw ValidationError("complex has no face carrying the support of the point");
  const Face& g = complex.faces()[*sub];
  VectorXq out(g.ambient());
  for (int k = 0; k < g.ambient(); ++k) out[k] = point[*f.coordinate_index(g.coordinate_ids()[k])];
  return {g.key, out};
}

TestFunction pullback(const TestFunction& f, const RetractionMap& map, const DualComplex& source) {
  if (source.fingerprint() != map.source_key) throw ValidationError("retraction does not start on the given complex");
  if (f.complex().fingerprint() != map.target_key)
    throw ValidationError("test function does not live on the retraction's target");
  std::map<StratumKey, FaceFunction> listed;
  for (const auto& face : source.faces()) {
    auto it = map.faces.find(face.key);
    if (it == map.faces.end()) throw ValidationError("retraction has no face " + to_string(face.key));
    listed[face.key] = f.on(it->second.target.key).pullback(to_double(it->second.matrix), face.coordinate_ids());
  }
  return TestFunction(source, std::move(listed));
}

}  // namespace degen

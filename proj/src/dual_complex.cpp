#include "degen/dual_complex.hpp"

#include "degen/errors.hpp"
#include "degen/quadrature.hpp"
#include "degen/test_function.hpp"

#include <algorithm>
#include <set>

namespace degen {

std::vector<std::string> Face::coordinate_ids() const {
  std::vector<std::string> ids = key.verticals;
  ids.insert(ids.end(), key.horizontals.begin(), key.horizontals.end());
  return ids;
}

std::optional<int> Face::coordinate_index(const std::string& id) const {
  for (int i = 0; i < p_plus_1(); ++i)
    if (key.verticals[i] == id) return i;
  for (int j = 0; j < q(); ++j)
    if (key.horizontals[j] == id) return p_plus_1() + j;
  return std::nullopt;
}

bool Face::contains(const VectorXq& point) const {
  if (point.size() != ambient()) return false;
  Rational total = 0;
  for (int k = 0; k < ambient(); ++k)
    if (point[k] < 0) return false;
  for (int i = 0; i < p_plus_1(); ++i) total += point[i] * b[i];
  return total == 1;
}

bool Face::contains(const VectorX<double>& point, double tol) const {
  if (point.size() != ambient()) return false;
  double total = 0;
  for (int k = 0; k < ambient(); ++k)
    if (point[k] < -tol) return false;
  for (int i = 0; i < p_plus_1(); ++i) total += point[i] * static_cast<double>(b[i]);
  return std::abs(total - 1.0) <= tol;
}

void Face::require_contains(const VectorXq& point) const {
  if (point.size() != ambient())
    throw ValidationError("point has " + std::to_string(point.size()) + " coordinates, face " +
                          to_string(key) + " has " + std::to_string(ambient()));
  if (!contains(point)) throw ValidationError("point is not on face " + to_string(key));
}

Face make_face(std::vector<std::int64_t> b, std::vector<Rational> a, std::vector<Rational> beta,
               StratumKey key) {
  if (b.empty()) throw ValidationError("a face needs at least one vertical coordinate");
  if (a.size() != b.size()) throw ValidationError("a and b have different lengths");
  for (auto bi : b)
    if (bi < 1) throw ValidationError("multiplicities must be positive");
  if (key.verticals.empty() && key.horizontals.empty()) {
    for (std::size_t i = 0; i < b.size(); ++i) key.verticals.push_back("x" + std::to_string(i));
    for (std::size_t j = 0; j < beta.size(); ++j) key.horizontals.push_back("y" + std::to_string(j + 1));
  }
  if (key.verticals.size() != b.size() || key.horizontals.size() != beta.size())
    throw ValidationError("face key does not match its coordinate data");
  Face f;
  f.key = std::move(key);
  f.b_sigma = gcd_of(b);
  f.b = std::move(b);
  f.a = std::move(a);
  f.beta = std::move(beta);
  return f;
}

MatrixXq Attachment::matrix() const {
  MatrixXq m = MatrixXq::Zero(to_ambient, static_cast<Eigen::Index>(embedding.size()));
  for (std::size_t k = 0; k < embedding.size(); ++k) m(embedding[k], static_cast<Eigen::Index>(k)) = 1;
  return m;
}

VectorXq Attachment::apply(const VectorXq& point) const {
  VectorXq out = VectorXq::Zero(to_ambient);
  for (std::size_t k = 0; k < embedding.size(); ++k) out[embedding[k]] = point[static_cast<Eigen::Index>(k)];
  return out;
}

std::optional<std::size_t> DualComplex::index_of(const StratumKey& key) const {
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  // tolerate keys listed in a different component order
  try {
    auto canon = canonical_key(model_, key);
    it = index_.find(canon);
    if (it != index_.end()) return it->second;
  } catch (const ValidationError&) {
  }
  return std::nullopt;
}

const Face& DualComplex::face(const StratumKey& key) const {
  auto i = index_of(key);
  if (!i) throw ValidationError("no face for stratum " + to_string(key));
  return faces_[*i];
}

const Attachment& DualComplex::attachment(std::size_t from, std::size_t to) const {
  auto it = attachment_index_.find({from, to});
  if (it == attachment_index_.end())
    throw ValidationError("face " + to_string(faces_[from].key) + " is not a face of " +
                          to_string(faces_[to].key));
  return attachments_[it->second];
}

std::optional<std::size_t> DualComplex::subface(std::size_t i, const std::vector<std::string>& verticals,
                                                const std::vector<std::string>& horizontals) const {
  auto same = [&](std::size_t k) {
    const auto& key = faces_[k].key;
    return std::set<std::string>(key.verticals.begin(), key.verticals.end()) ==
               std::set<std::string>(verticals.begin(), verticals.end()) &&
           std::set<std::string>(key.horizontals.begin(), key.horizontals.end()) ==
               std::set<std::string>(horizontals.begin(), horizontals.end());
  };
  if (same(i)) return i;
  for (auto k : ancestors_[i])
    if (same(k)) return k;
  return std::nullopt;
}

namespace {

bool is_subset(const std::vector<std::string>& small, const std::vector<std::string>& big) {
  return std::all_of(small.begin(), small.end(), [&](const std::string& s) {
    return std::find(big.begin(), big.end(), s) != big.end();
  });
}

std::size_t index_count(const StratumKey& k) { return k.verticals.size() + k.horizontals.size(); }

}  // namespace

DualComplex build_complex(const ModelData& model) {
  DualComplex cx;
  cx.model_ = model;

  std::set<std::string> ids;
  for (const auto& v : model.verticals) {
    if (v.id.empty()) throw ValidationError("vertical component with empty id");
    if (v.b < 1) throw ValidationError("vertical " + v.id + " has multiplicity b=" + std::to_string(v.b) + " < 1");
    if (!ids.insert(v.id).second) throw ValidationError("duplicate component id '" + v.id + "'");
  }
  for (const auto& h : model.horizontals) {
    if (h.id.empty()) throw ValidationError("horizontal component with empty id");
    if (!ids.insert(h.id).second) throw ValidationError("duplicate component id '" + h.id + "'");
  }

  const std::size_t n = model.strata.size();
  std::vector<StratumKey> keys;
  for (const auto& s : model.strata) {
    auto key = canonical_key(model, s.key);
    if (key.verticals.empty())
      throw ValidationError("stratum " + to_string(key) + " lies on no vertical component");
    if (cx.index_.count(key)) throw ValidationError("duplicate stratum " + to_string(key));
    cx.index_[key] = keys.size();
    keys.push_back(key);
  }
  for (const auto& v : model.verticals) {
    bool found = std::any_of(keys.begin(), keys.end(), [&](const StratumKey& k) {
      return k.verticals.size() == 1 && k.verticals[0] == v.id && k.horizontals.empty();
    });
    if (!found) throw ValidationError("vertical " + v.id + " has no vertex stratum {" + v.id + "}");
  }

  cx.parents_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    const auto& key = keys[i];
    const auto& explicit_parents = model.strata[i].parents;
    if (explicit_parents) {
      for (const auto& pk : *explicit_parents) {
        auto canon = canonical_key(model, pk);
        auto it = cx.index_.find(canon);
        if (it == cx.index_.end())
          throw ValidationError("stratum " + to_string(key) + " lists unknown parent " + to_string(canon));
        if (!is_subset(canon.verticals, key.verticals) || !is_subset(canon.horizontals, key.horizontals) ||
            index_count(canon) >= index_count(key))
          throw ValidationError("parent " + to_string(canon) + " of " + to_string(key) +
                                " does not contain it");
        cx.parents_[i].push_back(it->second);
      }
    } else {
      std::map<std::pair<std::vector<std::string>, std::vector<std::string>>, std::vector<std::size_t>> by_sets;
      for (std::size_t j = 0; j < n; ++j) {
        const auto& pk = keys[j];
        if (index_count(pk) + 1 != index_count(key)) continue;
        if (!is_subset(pk.verticals, key.verticals) || !is_subset(pk.horizontals, key.horizontals)) continue;
        by_sets[{pk.verticals, pk.horizontals}].push_back(j);
      }
      for (auto& [sets, cands] : by_sets) {
        if (cands.size() > 1)
          throw ValidationError("stratum " + to_string(key) +
                                " has several candidate parents with the same components; list its parents explicitly");
        cx.parents_[i].push_back(cands[0]);
      }
    }
    std::sort(cx.parents_[i].begin(), cx.parents_[i].end());
    cx.parents_[i].erase(std::unique(cx.parents_[i].begin(), cx.parents_[i].end()), cx.parents_[i].end());
  }

  // Parents have strictly fewer indices, so processing by index count
  // gives a valid order for the transitive closure.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return index_count(keys[l]) < index_count(keys[r]); });
  cx.ancestors_.assign(n, {});
  for (auto i : order) {
    std::set<std::size_t> anc;
    for (auto p : cx.parents_[i]) {
      anc.insert(p);
      anc.insert(cx.ancestors_[p].begin(), cx.ancestors_[p].end());
    }
    cx.ancestors_[i].assign(anc.begin(), anc.end());
    std::set<std::pair<std::vector<std::string>, std::vector<std::string>>> seen;
    for (auto a : anc)
      if (!seen.insert({keys[a].verticals, keys[a].horizontals}).second)
        throw ValidationError("stratum " + to_string(keys[i]) + " lies in two strata on the same components " +
                              to_string(keys[a]));
    // every coordinate face with a vertical left must be present
    const std::size_t want = ((std::size_t{1} << keys[i].verticals.size()) - 1) * (std::size_t{1} << keys[i].horizontals.size()) - 1;
    if (anc.size() != want)
      throw ValidationError("stratum " + to_string(keys[i]) + " is missing some of its faces (found " +
                            std::to_string(anc.size()) + " of " + std::to_string(want) + ")");
  }
  cx.descendants_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i)
    for (auto a : cx.ancestors_[i]) cx.descendants_[a].push_back(i);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& key = keys[i];
    std::vector<std::int64_t> b;
    std::vector<Rational> a, beta;
    for (const auto& id : key.verticals) {
      b.push_back(model.vertical(id).b);
      a.push_back(model.vertical(id).a);
    }
    for (const auto& id : key.horizontals) beta.push_back(model.horizontal(id).beta);
    cx.faces_.push_back(make_face(std::move(b), std::move(a), std::move(beta), key));
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (auto a : cx.ancestors_[i]) {
      Attachment att;
      att.from = a;
      att.to = i;
      att.to_ambient = cx.faces_[i].ambient();
      for (const auto& id : cx.faces_[a].coordinate_ids()) att.embedding.push_back(*cx.faces_[i].coordinate_index(id));
      cx.attachment_index_[{a, i}] = cx.attachments_.size();
      cx.attachments_.push_back(std::move(att));
    }
  }
  cx.fingerprint_ = model_fingerprint(model);
  return cx;
}

Rational lebesgue_density(const Face& face, int eliminated_index) {
  if (eliminated_index < 0 || eliminated_index >= face.p_plus_1())
    throw ValidationError("eliminated index " + std::to_string(eliminated_index) + " out of range for face " +
                          to_string(face.key));
  return Rational(face.b_sigma) / face.b[eliminated_index];
}

std::int64_t lattice_index_oracle(std::span<const std::int64_t> b) {
  if (b.empty()) return 1;
  const std::int64_t b0 = b[0];
  std::vector<char> reached(static_cast<std::size_t>(b0), 0);
  std::vector<std::int64_t> frontier{0};
  reached[0] = 1;
  while (!frontier.empty()) {
    auto r = frontier.back();
    frontier.pop_back();
    for (std::size_t i = 1; i < b.size(); ++i) {
      auto next = (r + b[i]) % b0;
      if (!reached[static_cast<std::size_t>(next)]) {
        reached[static_cast<std::size_t>(next)] = 1;
        frontier.push_back(next);
      }
    }
  }
  return std::count(reached.begin(), reached.end(), 1);
}

double integrate_on_face(const Face& face, const Rational& density, const FaceFunction& f, int eliminated_index) {
  if (f.ambient() != face.ambient())
    throw ValidationError("test function has " + std::to_string(f.ambient()) + " coordinates, face " +
                          to_string(face.key) + " has " + std::to_string(face.ambient()));
  if (eliminated_index < 0 || eliminated_index >= face.p_plus_1())
    throw ValidationError("eliminated index out of range for face " + to_string(face.key));
  std::vector<double> rates(static_cast<std::size_t>(face.dim()), 0.0);
  auto r = integrate_reduced(face, eliminated_index, f, rates);
  return to_double(density) * r.value;
}

}  // namespace degen

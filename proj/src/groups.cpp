#include "warpcone/groups.hpp"

#include <algorithm>
#include <cstdlib>

#include "warpcone/errors.hpp"

namespace warpcone {

namespace {

std::int64_t reduce(std::int64_t n, std::int64_t order) {
  if (order == 0) return n;
  std::int64_t r = n % order;
  return r < 0 ? r + order : r;
}

std::uint64_t cyclic_length(std::int64_t n, std::int64_t order) {
  if (order == 0) return static_cast<std::uint64_t>(n < 0 ? -n : n);
  std::int64_t r = reduce(n, order);
  return static_cast<std::uint64_t>(std::min(r, order - r));
}

std::uint64_t uabs(std::int64_t k) { return static_cast<std::uint64_t>(k < 0 ? -k : k); }

}  // namespace

GroupSpec GroupSpec::free_abelian(std::size_t rank) {
  if (rank == 0) throw ValidationError("FreeAbelian rank must be positive");
  GroupSpec G;
  G.kind_ = GroupKind::FreeAbelian;
  G.orders_.assign(rank, 0);
  G.build_generators();
  return G;
}

GroupSpec GroupSpec::infinite_dihedral(DihedralMarking marking) {
  GroupSpec G;
  G.kind_ = GroupKind::InfiniteDihedral;
  G.marking_ = marking;
  G.build_generators();
  return G;
}

GroupSpec GroupSpec::finite_cyclic(std::int64_t order) {
  if (order < 1) throw ValidationError("FiniteCyclic order must be >= 1");
  GroupSpec G;
  G.kind_ = GroupKind::FiniteCyclic;
  G.orders_ = {order};
  G.build_generators();
  return G;
}

GroupSpec GroupSpec::finite_abelian_product(std::vector<std::int64_t> orders) {
  if (orders.empty()) throw ValidationError("FiniteAbelianProduct needs at least one factor");
  for (auto l : orders)
    if (l < 1) throw ValidationError("FiniteAbelianProduct orders must be >= 1");
  GroupSpec G;
  G.kind_ = GroupKind::FiniteAbelianProduct;
  G.orders_ = std::move(orders);
  G.build_generators();
  return G;
}

GroupSpec GroupSpec::abelian_product(std::vector<std::int64_t> orders) {
  for (auto l : orders)
    if (l < 0) throw ValidationError("abelian factor orders must be >= 0");
  GroupSpec G;
  G.kind_ = GroupKind::AbelianProduct;
  G.orders_ = std::move(orders);
  G.build_generators();
  return G;
}

bool GroupSpec::is_finite() const noexcept {
  if (kind_ == GroupKind::InfiniteDihedral) return false;
  return std::none_of(orders_.begin(), orders_.end(), [](auto l) { return l == 0; });
}

std::size_t GroupSpec::coordinates() const noexcept {
  return kind_ == GroupKind::InfiniteDihedral ? 2 : orders_.size();
}

Word GroupSpec::identity() const { return Word{std::vector<std::int64_t>(coordinates(), 0)}; }

void GroupSpec::build_generators() {
  gens_.clear();
  if (kind_ == GroupKind::InfiniteDihedral) {
    if (marking_ == DihedralMarking::Reflections) {
      gens_.push_back({"r", Word{{0, 1}}, 0});
      gens_.push_back({"r'", Word{{1, 1}}, 1});
    } else {
      gens_.push_back({"eps", Word{{1, 0}}, 1});
      gens_.push_back({"eps^-1", Word{{-1, 0}}, 0});
      gens_.push_back({"r", Word{{0, 1}}, 2});
    }
    return;
  }
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    const std::int64_t l = orders_[i];
    if (l == 1) continue;  // trivial factor contributes no generator
    std::string name = "g" + std::to_string(i + 1);
    Word e = identity();
    e.nf[i] = 1;
    if (l == 2) {
      gens_.push_back({name, e, gens_.size()});
      continue;
    }
    Word einv = identity();
    einv.nf[i] = reduce(-1, l);
    const std::size_t at = gens_.size();
    gens_.push_back({name, e, at + 1});
    gens_.push_back({name + "^-1", einv, at});
  }
}

std::size_t GroupSpec::generator_index(const std::string& label) const {
  for (std::size_t i = 0; i < gens_.size(); ++i)
    if (gens_[i].label == label) return i;
  throw ValidationError("unknown generator label '" + label + "' for " + describe());
}

std::string GroupSpec::describe() const {
  auto list = [&] {
    std::string s;
    for (std::size_t i = 0; i < orders_.size(); ++i) s += (i ? "," : "") + std::to_string(orders_[i]);
    return s;
  };
  switch (kind_) {
    case GroupKind::FreeAbelian:
      return "FreeAbelian(" + std::to_string(orders_.size()) + ")";
    case GroupKind::InfiniteDihedral:
      return marking_ == DihedralMarking::Reflections ? "InfiniteDihedral{r,r'}"
                                                      : "InfiniteDihedral{eps,r}";
    case GroupKind::FiniteCyclic:
      return "FiniteCyclic(" + std::to_string(orders_[0]) + ")";
    case GroupKind::FiniteAbelianProduct:
      return "FiniteAbelianProduct(" + list() + ")";
    case GroupKind::AbelianProduct:
      return "AbelianProduct(" + list() + ")";
  }
  return "?";
}

void validate(const Word& g, const GroupSpec& G) {
  if (g.nf.size() != G.coordinates()) {
    throw ValidationError("normal form has " + std::to_string(g.nf.size()) +
                          " coordinates, expected " + std::to_string(G.coordinates()) +
                          " for " + G.describe());
  }
  if (G.kind() == GroupKind::InfiniteDihedral) {
    if (g.nf[1] != 0 && g.nf[1] != 1) throw ValidationError("dihedral parity bit must be 0 or 1");
    return;
  }
  for (std::size_t i = 0; i < g.nf.size(); ++i) {
    const auto l = G.orders()[i];
    if (l != 0 && (g.nf[i] < 0 || g.nf[i] >= l)) {
      throw ValidationError("coordinate " + std::to_string(i) + " not reduced modulo " +
                            std::to_string(l));
    }
  }
}

Word normalize(Word g, const GroupSpec& G) {
  if (g.nf.size() != G.coordinates()) validate(g, G);
  if (G.kind() == GroupKind::InfiniteDihedral) {
    g.nf[1] = reduce(g.nf[1], 2);
    return g;
  }
  for (std::size_t i = 0; i < g.nf.size(); ++i) g.nf[i] = reduce(g.nf[i], G.orders()[i]);
  return g;
}

std::uint64_t word_length(const Word& g, const GroupSpec& G) {
  validate(g, G);
  if (G.kind() == GroupKind::InfiniteDihedral) {
    const std::int64_t k = g.nf[0];
    const bool reflection = g.nf[1] == 1;
    if (G.marking() == DihedralMarking::RotationReflection) return uabs(k) + (reflection ? 1 : 0);
    if (!reflection) return 2 * uabs(k);
    // (r'r)^k r = (r'r)^(k-1) r' for k >= 1; r (r'r)^(-k) otherwise.
    return k >= 1 ? 2 * uabs(k) - 1 : 2 * uabs(k) + 1;
  }
  std::uint64_t len = 0;
  for (std::size_t i = 0; i < g.nf.size(); ++i) len += cyclic_length(g.nf[i], G.orders()[i]);
  return len;
}

Word multiply(const Word& g, const Word& h, const GroupSpec& G) {
  validate(g, G);
  validate(h, G);
  if (G.kind() == GroupKind::InfiniteDihedral) {
    // eps^k1 r^s1 eps^k2 r^s2 = eps^(k1 + (-1)^s1 k2) r^(s1+s2)
    const std::int64_t k = g.nf[0] + (g.nf[1] ? -h.nf[0] : h.nf[0]);
    return Word{{k, g.nf[1] ^ h.nf[1]}};
  }
  Word r = g;
  for (std::size_t i = 0; i < r.nf.size(); ++i) r.nf[i] = reduce(g.nf[i] + h.nf[i], G.orders()[i]);
  return r;
}

Word inverse(const Word& g, const GroupSpec& G) {
  validate(g, G);
  if (G.kind() == GroupKind::InfiniteDihedral) {
    return g.nf[1] ? g : Word{{-g.nf[0], 0}};
  }
  Word r = g;
  for (std::size_t i = 0; i < r.nf.size(); ++i) r.nf[i] = reduce(-g.nf[i], G.orders()[i]);
  return r;
}

namespace {

void enumerate_abelian(const GroupSpec& G, std::size_t i, std::uint64_t budget, Word& cur,
                       std::vector<Word>& out, std::size_t cap) {
  if (i == G.orders().size()) {
    if (out.size() >= cap) throw CapacityError("group ball exceeds enumeration cap", cap);
    out.push_back(cur);
    return;
  }
  const std::int64_t l = G.orders()[i];
  if (l == 0) {
    const auto b = static_cast<std::int64_t>(budget);
    for (std::int64_t n = -b; n <= b; ++n) {
      cur.nf[i] = n;
      enumerate_abelian(G, i + 1, budget - uabs(n), cur, out, cap);
    }
  } else {
    for (std::int64_t n = 0; n < l; ++n) {
      const auto c = cyclic_length(n, l);
      if (c > budget) continue;
      cur.nf[i] = n;
      enumerate_abelian(G, i + 1, budget - c, cur, out, cap);
    }
  }
  cur.nf[i] = 0;
}

}  // namespace

std::vector<Word> ball(const GroupSpec& G, std::uint64_t R, std::size_t cap) {
  std::vector<Word> out;
  if (G.kind() == GroupKind::InfiniteDihedral) {
    const auto b = static_cast<std::int64_t>(R);
    for (std::int64_t k = -b; k <= b; ++k) {
      for (std::int64_t s = 0; s <= 1; ++s) {
        Word w{{k, s}};
        if (word_length(w, G) <= R) {
          if (out.size() >= cap) throw CapacityError("group ball exceeds enumeration cap", cap);
          out.push_back(w);
        }
      }
    }
  } else {
    if (R > static_cast<std::uint64_t>(cap)) {
      // Any infinite factor alone contributes 2R+1 elements.
      for (auto l : G.orders())
        if (l == 0) throw CapacityError("group ball exceeds enumeration cap", cap);
    }
    Word cur = G.identity();
    enumerate_abelian(G, 0, R, cur, out, cap);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Word> ball_by_length(const GroupSpec& G, std::uint64_t R, std::size_t cap) {
  auto b = ball(G, R, cap);
  std::vector<std::pair<std::uint64_t, Word>> keyed;
  keyed.reserve(b.size());
  for (auto& w : b) keyed.emplace_back(word_length(w, G), std::move(w));
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& c) { return a.first < c.first; });
  std::vector<Word> out;
  out.reserve(keyed.size());
  for (auto& [len, w] : keyed) out.push_back(std::move(w));
  return out;
}

std::string to_string(const Word& g, const GroupSpec& G) {
  if (G.kind() == GroupKind::InfiniteDihedral) {
    std::string s = "(r'r)^" + std::to_string(g.nf[0]);
    if (g.nf[1]) s += " r";
    return s;
  }
  std::string s = "(";
  for (std::size_t i = 0; i < g.nf.size(); ++i) s += (i ? "," : "") + std::to_string(g.nf[i]);
  return s + ")";
}

nlohmann::json to_json(const Word& g) { return g.nf; }

Word word_from_json(const nlohmann::json& j, const GroupSpec& G) {
  if (!j.is_array()) throw ValidationError("word must be a JSON integer array");
  Word w{j.get<std::vector<std::int64_t>>()};
  return normalize(std::move(w), G);
}

nlohmann::json to_json(const GroupSpec& G) {
  nlohmann::json j;
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : G.generators()) gens.push_back(g.label);
  switch (G.kind()) {
    case GroupKind::FreeAbelian:
      j["kind"] = "FreeAbelian";
      j["params"] = {{"rank", G.orders().size()}};
      break;
    case GroupKind::InfiniteDihedral:
      j["kind"] = "InfiniteDihedral";
      j["params"] = {{"marking", G.marking() == DihedralMarking::Reflections
                                     ? "reflections"
                                     : "rotation_reflection"}};
      break;
    case GroupKind::FiniteCyclic:
      j["kind"] = "FiniteCyclic";
      j["params"] = {{"order", G.orders()[0]}};
      break;
    case GroupKind::FiniteAbelianProduct:
      j["kind"] = "FiniteAbelianProduct";
      j["params"] = {{"orders", G.orders()}};
      break;
    case GroupKind::AbelianProduct:
      j["kind"] = "AbelianProduct";
      j["params"] = {{"orders", G.orders()}};
      break;
  }
  j["generators"] = gens;
  return j;
}

GroupSpec group_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const auto& p = j.contains("params") ? j.at("params") : nlohmann::json::object();
    GroupSpec G = [&] {
      if (kind == "FreeAbelian") return GroupSpec::free_abelian(p.at("rank").get<std::size_t>());
      if (kind == "InfiniteDihedral") {
        const std::string m = p.value("marking", std::string("reflections"));
        if (m == "reflections") return GroupSpec::infinite_dihedral(DihedralMarking::Reflections);
        if (m == "rotation_reflection")
          return GroupSpec::infinite_dihedral(DihedralMarking::RotationReflection);
        throw ValidationError("unknown dihedral marking '" + m + "'");
      }
      if (kind == "FiniteCyclic") return GroupSpec::finite_cyclic(p.at("order").get<std::int64_t>());
      if (kind == "FiniteAbelianProduct")
        return GroupSpec::finite_abelian_product(p.at("orders").get<std::vector<std::int64_t>>());
      if (kind == "AbelianProduct")
        return GroupSpec::abelian_product(p.at("orders").get<std::vector<std::int64_t>>());
      throw ValidationError("unknown group kind '" + kind + "'");
    }();
    if (j.contains("generators")) {
      auto labels = j.at("generators").get<std::vector<std::string>>();
      std::vector<std::string> expected;
      for (const auto& g : G.generators()) expected.push_back(g.label);
      if (labels != expected) {
        throw ValidationError("generator labels do not match the marked set of " + G.describe());
      }
    }
    return G;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("group JSON: ") + e.what());
  }
}

}  // namespace warpcone

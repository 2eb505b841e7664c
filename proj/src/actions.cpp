#include "warpcone/actions.hpp"

#include <algorithm>
#include <set>

#include "warpcone/errors.hpp"

namespace warpcone {

namespace {

using nlohmann::json;

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw ValidationError("expected a rational string, got " + j.dump());
}

std::vector<Rational> rationals_from_json(const json& j) {
  std::vector<Rational> out;
  if (j.is_array()) {
    for (auto& v : j) out.push_back(rational_from_json(v));
  } else {
    out.push_back(rational_from_json(j));
  }
  return out;
}

json rationals_to_json(const std::vector<Rational>& v) {
  json a = json::array();
  for (auto& x : v) a.push_back(to_string(x));
  return a;
}

std::int64_t mod64(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

bool space_is_circular(const FiniteNet& s) {
  return s.kind() == NetKind::CircleQ || s.kind() == NetKind::TorusProduct;
}

}  // namespace

// ---------------------------------------------------------------- GeneratorMap

GeneratorMap GeneratorMap::rotation(std::vector<Rational> angle) {
  if (angle.empty()) throw ValidationError("rotation needs an angle");
  GeneratorMap m;
  m.type_ = MapType::Rotation;
  for (auto& a : angle) a = mod1(a);
  m.values_ = std::move(angle);
  return m;
}

GeneratorMap GeneratorMap::reflection(std::vector<Rational> center) {
  if (center.empty()) throw ValidationError("reflection needs a center");
  GeneratorMap m;
  m.type_ = MapType::Reflection;
  for (auto& c : center) c = mod1(c);
  m.values_ = std::move(center);
  return m;
}

GeneratorMap GeneratorMap::translation(std::vector<std::int64_t> shift) {
  GeneratorMap m;
  m.type_ = MapType::Translation;
  m.shift_ = std::move(shift);
  return m;
}

GeneratorMap GeneratorMap::permutation(std::vector<std::size_t> images) {
  GeneratorMap m;
  m.type_ = MapType::Permutation;
  m.inverse_images_.assign(images.size(), SIZE_MAX);
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i] >= images.size() || m.inverse_images_[images[i]] != SIZE_MAX)
      throw ValidationError("permutation images are not a bijection");
    m.inverse_images_[images[i]] = i;
  }
  m.images_ = std::move(images);
  return m;
}

GeneratorMap GeneratorMap::pl_conjugate(Rational angle,
                                        std::vector<std::pair<Rational, Rational>> breaks) {
  GeneratorMap m;
  m.type_ = MapType::PlConjugate;
  m.values_ = {mod1(angle)};
  m.breaks_.emplace_back(0, 0);
  for (auto& b : breaks) m.breaks_.push_back(b);
  m.breaks_.emplace_back(1, 1);
  for (std::size_t k = 1; k < m.breaks_.size(); ++k) {
    if (m.breaks_[k].first <= m.breaks_[k - 1].first || m.breaks_[k].second <= m.breaks_[k - 1].second)
      throw ValidationError("PL breakpoints must be strictly increasing in (0,1)");
  }
  return m;
}

Rational pl_eval(const std::vector<std::pair<Rational, Rational>>& b, const Rational& x) {
  for (std::size_t k = 1; k < b.size(); ++k) {
    if (x < b[k].first || k + 1 == b.size()) {
      const auto& [x0, y0] = b[k - 1];
      const auto& [x1, y1] = b[k];
      return y0 + (x - x0) * (y1 - y0) / (x1 - x0);
    }
  }
  return x;
}

Rational pl_inverse(const std::vector<std::pair<Rational, Rational>>& b, const Rational& y) {
  for (std::size_t k = 1; k < b.size(); ++k) {
    if (y < b[k].second || k + 1 == b.size()) {
      const auto& [x0, y0] = b[k - 1];
      const auto& [x1, y1] = b[k];
      return x0 + (y - y0) * (x1 - x0) / (y1 - y0);
    }
  }
  return y;
}

Point GeneratorMap::apply_power(const Point& p, std::int64_t n, const FiniteNet& space) const {
  switch (type_) {
    case MapType::Rotation: {
      if (p.size() != values_.size()) throw ValidationError("rotation dimension mismatch");
      Point q(p.size());
      for (std::size_t c = 0; c < p.size(); ++c) q[c] = mod1(p[c] + Rational(n) * values_[c]);
      return q;
    }
    case MapType::Reflection: {
      if (p.size() != values_.size()) throw ValidationError("reflection dimension mismatch");
      if (n % 2 == 0) return p;
      Point q(p.size());
      for (std::size_t c = 0; c < p.size(); ++c) q[c] = mod1(values_[c] - p[c]);
      return q;
    }
    case MapType::Translation: {
      const auto& orders = space.orders();
      if (p.size() != shift_.size() || orders.size() != shift_.size())
        throw ValidationError("translation dimension mismatch");
      Point q(p.size());
      for (std::size_t c = 0; c < p.size(); ++c) {
        const std::int64_t d = to_int64(numer(p[c]));
        q[c] = mod64(d + mod64(n, orders[c]) * shift_[c], orders[c]);
      }
      return q;
    }
    case MapType::Permutation: {
      auto i = static_cast<std::size_t>(to_int64(numer(p.at(0))));
      if (i >= images_.size()) throw ValidationError("permutation applied outside its range");
      const auto& table = n >= 0 ? images_ : inverse_images_;
      for (std::int64_t k = 0; k < (n < 0 ? -n : n); ++k) i = table[i];
      return Point{Rational(static_cast<long>(i))};
    }
    case MapType::PlConjugate: {
      if (p.size() != 1) throw ValidationError("PL maps act on the circle");
      Rational z = pl_inverse(breaks_, p[0]);
      return Point{pl_eval(breaks_, mod1(z + Rational(n) * values_[0]))};
    }
  }
  return p;
}

GeneratorMap GeneratorMap::inverse() const {
  GeneratorMap m = *this;
  switch (type_) {
    case MapType::Rotation:
    case MapType::PlConjugate:
      for (auto& a : m.values_) a = mod1(-a);
      break;
    case MapType::Reflection:
      break;
    case MapType::Translation:
      for (auto& s : m.shift_) s = -s;
      break;
    case MapType::Permutation:
      std::swap(m.images_, m.inverse_images_);
      break;
  }
  return m;
}

json GeneratorMap::to_json() const {
  switch (type_) {
    case MapType::Rotation:
      return {{"type", "rotation"}, {"angle", rationals_to_json(values_)}};
    case MapType::Reflection:
      return {{"type", "reflection"}, {"center", rationals_to_json(values_)}};
    case MapType::Translation:
      return {{"type", "translation"}, {"shift", shift_}};
    case MapType::Permutation:
      return {{"type", "permutation"}, {"images", images_}};
    case MapType::PlConjugate: {
      json b = json::array();
      for (std::size_t k = 1; k + 1 < breaks_.size(); ++k)
        b.push_back({to_string(breaks_[k].first), to_string(breaks_[k].second)});
      return {{"type", "pl-conjugate"}, {"angle", to_string(values_[0])}, {"breaks", b}};
    }
  }
  return {};
}

GeneratorMap GeneratorMap::from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "rotation") return rotation(rationals_from_json(j.at("angle")));
  if (type == "reflection") return reflection(rationals_from_json(j.at("center")));
  if (type == "translation") return translation(j.at("shift").get<std::vector<std::int64_t>>());
  if (type == "permutation") return permutation(j.at("images").get<std::vector<std::size_t>>());
  if (type == "pl-conjugate") {
    std::vector<std::pair<Rational, Rational>> breaks;
    for (auto& b : j.at("breaks")) breaks.emplace_back(rational_from_json(b.at(0)), rational_from_json(b.at(1)));
    return pl_conjugate(rational_from_json(j.at("angle")), std::move(breaks));
  }
  throw ValidationError("unknown map type '" + type + "'");
}

// ---------------------------------------------------------------- ActionSystem

ActionSystem::ActionSystem(GroupSpec group, FiniteNet space, std::vector<GeneratorMap> basic_maps)
    : group_(std::move(group)), space_(std::move(space)), maps_(std::move(basic_maps)) {
  const auto& gens = group_.generators();
  basic_of_.assign(gens.size(), std::nullopt);
  inverted_.assign(gens.size(), false);
  std::vector<std::int64_t> basic_order;
  if (group_.kind() == GroupKind::InfiniteDihedral) {
    if (maps_.size() != 2) throw ValidationError("dihedral actions need two generator maps");
    if (group_.marking() == DihedralMarking::Reflections) {
      basic_of_ = {0, 1};
    } else {
      basic_of_ = {0, 0, 1};
      inverted_ = {false, true, false};
    }
  } else {
    std::size_t b = 0;
    for (std::size_t i = 0; i < group_.orders().size(); ++i) {
      const std::int64_t l = group_.orders()[i];
      if (l == 1) continue;
      basic_order.push_back(l);
      for (std::size_t g = 0; g < gens.size(); ++g) {
        if (gens[g].element.nf[i] == 0) continue;
        basic_of_[g] = b;
        inverted_[g] = gens[g].label.size() > 3 && gens[g].label.ends_with("^-1");
      }
      ++b;
    }
    if (maps_.size() != b)
      throw ValidationError("expected " + std::to_string(b) + " generator maps, got " +
                            std::to_string(maps_.size()));
  }
  for (const auto& m : maps_) {
    bool ok = false;
    switch (m.type()) {
      case MapType::Rotation:
      case MapType::Reflection:
        ok = space_is_circular(space_) && m.values().size() == space_.dimension();
        break;
      case MapType::PlConjugate:
        ok = space_.kind() == NetKind::CircleQ;
        break;
      case MapType::Translation:
        ok = space_.kind() == NetKind::UltrametricChain && m.shift().size() == space_.dimension();
        break;
      case MapType::Permutation:
        ok = space_.kind() == NetKind::ExplicitMatrix && m.images().size() == space_.size();
        break;
    }
    if (!ok) throw ValidationError("generator map does not fit the space");
  }
  // Relations, checked on the points of the space.
  for (const auto& p : space_.points()) {
    if (group_.kind() == GroupKind::InfiniteDihedral) {
      const auto& r = maps_[group_.marking() == DihedralMarking::Reflections ? 0 : 1];
      if (r.apply_power(r.apply_power(p, 1, space_), 1, space_) != p)
        throw ValidationError("reflection generator is not an involution");
      if (group_.marking() == DihedralMarking::Reflections) {
        const auto& r2 = maps_[1];
        if (r2.apply_power(r2.apply_power(p, 1, space_), 1, space_) != p)
          throw ValidationError("reflection generator is not an involution");
      } else {
        // r eps r = eps^-1
        Point a = r.apply_power(maps_[0].apply_power(r.apply_power(p, 1, space_), 1, space_), 1, space_);
        if (a != maps_[0].apply_power(p, -1, space_))
          throw ValidationError("dihedral relation r eps r = eps^-1 fails");
      }
      continue;
    }
    for (std::size_t b = 0; b < maps_.size(); ++b) {
      if (basic_order[b] != 0 && maps_[b].apply_power(p, basic_order[b], space_) != p)
        throw ValidationError("generator map order does not divide the factor order");
      for (std::size_t c = b + 1; c < maps_.size(); ++c) {
        Point x = maps_[b].apply_power(maps_[c].apply_power(p, 1, space_), 1, space_);
        Point y = maps_[c].apply_power(maps_[b].apply_power(p, 1, space_), 1, space_);
        if (x != y) throw ValidationError("generator maps of an abelian group do not commute");
      }
    }
  }
}

std::vector<std::string> ActionSystem::basic_labels() const {
  std::vector<std::string> out(maps_.size());
  const auto& gens = group_.generators();
  for (std::size_t g = 0; g < gens.size(); ++g)
    if (basic_of_[g] && !inverted_[g]) out[*basic_of_[g]] = gens[g].label;
  return out;
}

Point ActionSystem::apply_generator(std::size_t gen, const Point& x) const {
  const auto b = basic_of_.at(gen);
  if (!b) throw ValidationError("generator without a map");
  return maps_[*b].apply_power(x, inverted_[gen] ? -1 : 1, space_);
}

Point ActionSystem::apply(const Word& g, const Point& x) const {
  validate(g, group_);
  if (group_.kind() == GroupKind::InfiniteDihedral) {
    const std::int64_t k = g.nf[0];
    if (group_.marking() == DihedralMarking::RotationReflection) {
      Point y = g.nf[1] ? maps_[1].apply_power(x, 1, space_) : x;
      return maps_[0].apply_power(y, k, space_);
    }
    const auto& r = maps_[0];
    const auto& r2 = maps_[1];
    Point y = g.nf[1] ? r.apply_power(x, 1, space_) : x;
    if (r.type() == MapType::Reflection && r2.type() == MapType::Reflection) {
      // r' r is the rotation by c' - c
      std::vector<Rational> shift(r.values().size());
      for (std::size_t c = 0; c < shift.size(); ++c) shift[c] = r2.values()[c] - r.values()[c];
      return GeneratorMap::rotation(std::move(shift)).apply_power(y, k, space_);
    }
    for (std::int64_t i = 0; i < (k < 0 ? -k : k); ++i) {
      if (k > 0)
        y = r2.apply_power(r.apply_power(y, 1, space_), 1, space_);
      else
        y = r.apply_power(r2.apply_power(y, 1, space_), 1, space_);
    }
    return y;
  }
  Point y = x;
  std::size_t b = 0;
  for (std::size_t i = 0; i < g.nf.size(); ++i) {
    const std::int64_t l = group_.orders()[i];
    if (l == 1) continue;
    std::int64_t n = g.nf[i];
    if (l > 0 && n > l / 2) n -= l;
    if (n != 0) y = maps_[b].apply_power(y, n, space_);
    ++b;
  }
  return y;
}

std::vector<std::size_t> ActionSystem::spelling(const Word& g) const {
  validate(g, group_);
  std::vector<std::size_t> out;
  if (group_.kind() == GroupKind::InfiniteDihedral) {
    const std::int64_t k = g.nf[0];
    const bool refl = g.nf[1] == 1;
    if (group_.marking() == DihedralMarking::RotationReflection) {
      if (refl) out.push_back(2);
      for (std::int64_t i = 0; i < (k < 0 ? -k : k); ++i) out.push_back(k > 0 ? 0 : 1);
      return out;
    }
    // application order; index 0 = r, 1 = r'
    if (!refl) {
      for (std::int64_t i = 0; i < (k < 0 ? -k : k); ++i) {
        out.push_back(k > 0 ? 0 : 1);
        out.push_back(k > 0 ? 1 : 0);
      }
    } else if (k >= 1) {
      out.push_back(1);
      for (std::int64_t i = 1; i < k; ++i) {
        out.push_back(0);
        out.push_back(1);
      }
    } else {
      out.push_back(0);
      for (std::int64_t i = 0; i < -k; ++i) {
        out.push_back(1);
        out.push_back(0);
      }
    }
    return out;
  }
  const auto& gens = group_.generators();
  for (std::size_t i = 0; i < g.nf.size(); ++i) {
    const std::int64_t l = group_.orders()[i];
    if (l == 1) continue;
    std::int64_t n = g.nf[i];
    if (l > 0 && n > l / 2) n -= l;
    Word e = group_.identity();
    e.nf[i] = n > 0 ? 1 : (l > 0 ? l - 1 : -1);
    std::size_t gi = gens.size();
    for (std::size_t k = 0; k < gens.size(); ++k)
      if (gens[k].element == e) gi = k;
    for (std::int64_t c = 0; c < (n < 0 ? -n : n); ++c) out.push_back(gi);
  }
  return out;
}

std::size_t ActionSystem::apply_in(const Word& g, std::size_t x, const FiniteNet& domain) const {
  Point p = domain.point(x);
  std::size_t idx = x;
  auto sp = spelling(g);
  for (std::size_t k = 0; k < sp.size(); ++k) {
    p = apply_generator(sp[k], p);
    auto at = domain.index_of(p);
    if (!at)
      throw ClosureError("applying " + to_string(g, group_) + " to " + domain.label(x) +
                             " leaves the domain after prefix of length " + std::to_string(k + 1),
                         sp.size());
    idx = *at;
  }
  return idx;
}

bool ActionSystem::verify_isometric(const FiniteNet& domain) {
  const std::size_t n = domain.size();
  const std::size_t G = group_.generators().size();
  DomainAction da = restrict_to(*this, domain);
  const FixedView* f = domain.fixed();
  bool ok = true;
  if (f && da.closed()) {
    for (std::size_t g = 0; g < G && ok; ++g)
      for (std::size_t i = 0; i < n && ok; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (f->num(da.images[g][i], da.images[g][j]) != f->num(i, j)) {
            ok = false;
            break;
          }
  } else {
    std::vector<std::vector<Point>> img(G);
    for (std::size_t g = 0; g < G; ++g)
      for (std::size_t i = 0; i < n; ++i) img[g].push_back(apply_generator(g, domain.point(i)));
    for (std::size_t g = 0; g < G && ok; ++g)
      for (std::size_t i = 0; i < n && ok; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (space_.distance_between(img[g][i], img[g][j]) != domain.distance(i, j)) {
            ok = false;
            break;
          }
  }
  isometric_ = ok;
  if (ok) lipschitz_ = Rational(1);
  return ok;
}

Rational ActionSystem::verify_lipschitz(const FiniteNet& domain) {
  const std::size_t n = domain.size();
  const std::size_t G = group_.generators().size();
  DomainAction da = restrict_to(*this, domain);
  const FixedView* f = domain.fixed();
  Rational best = n > 1 ? 1 : 0;
  if (f && da.closed()) {
    using u128 = unsigned __int128;
    int128 bn = 1, bd = 1;
    for (std::size_t g = 0; g < G; ++g)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          int128 a = f->num(da.images[g][i], da.images[g][j]);
          int128 b = f->num(i, j);
          if (compare_products(static_cast<u128>(a), static_cast<u128>(bd), static_cast<u128>(bn),
                               static_cast<u128>(b)) > 0) {
            bn = a;
            bd = b;
          }
        }
    best = Rational(from_int128(bn), from_int128(bd));
  } else {
    for (std::size_t g = 0; g < G; ++g) {
      std::vector<Point> img;
      for (std::size_t i = 0; i < n; ++i) img.push_back(apply_generator(g, domain.point(i)));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          Rational r = space_.distance_between(img[i], img[j]) / domain.distance(i, j);
          if (r > best) best = r;
        }
    }
  }
  lipschitz_ = best;
  if (best != 1) isometric_ = false;
  return best;
}

ActionSystem ActionSystem::scaled(const Rational& t) const {
  ActionSystem s(group_, scale(space_, t), maps_);
  s.isometric_ = isometric_;
  s.lipschitz_ = lipschitz_;
  return s;
}

// ---------------------------------------------------------------- JSON

json to_json(const FiniteNet& net) {
  json pts = json::array();
  for (const auto& p : net.points()) pts.push_back(rationals_to_json(p));
  switch (net.kind()) {
    case NetKind::CircleQ: {
      json xs = json::array();
      for (const auto& p : net.points()) xs.push_back(to_string(p[0]));
      return {{"kind", "circle"}, {"scale", to_string(net.scales()[0])}, {"points", xs}};
    }
    case NetKind::TorusProduct:
      return {{"kind", "torus"},
              {"scales", rationals_to_json(net.scales())},
              {"norm", net.norm() == TorusNorm::L1 ? "l1" : "linf"},
              {"points", pts}};
    case NetKind::UltrametricChain:
      return {{"kind", "ultrametric"},
              {"orders", net.orders()},
              {"weights", rationals_to_json(net.weights())},
              {"points", pts}};
    case NetKind::ExplicitMatrix: {
      json labels = json::array(), rows = json::array();
      for (std::size_t i = 0; i < net.size(); ++i) {
        labels.push_back(net.label(i));
        json row = json::array();
        for (std::size_t j = 0; j < net.size(); ++j) row.push_back(to_string(net.distance(i, j)));
        rows.push_back(row);
      }
      return {{"kind", "matrix"}, {"labels", labels}, {"matrix", rows}};
    }
  }
  return {};
}

FiniteNet net_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "circle") {
    std::vector<Rational> extra;
    if (j.contains("points"))
      for (auto& v : j.at("points")) extra.push_back(rational_from_json(v));
    Rational sc = j.contains("scale") ? rational_from_json(j.at("scale")) : Rational(1);
    FiniteNet base = j.contains("denominator")
                         ? circle_net(j.at("denominator").get<std::int64_t>(), extra)
                         : FiniteNet::circle(extra);
    return sc == 1 ? base : scale(base, sc);
  }
  if (kind == "torus") {
    TorusNorm norm = j.value("norm", std::string("l1")) == "linf" ? TorusNorm::LInf : TorusNorm::L1;
    if (j.contains("factors")) {
      std::vector<TorusFactor> fs;
      for (auto& f : j.at("factors"))
        fs.push_back({circle_net(f.at("denominator").get<std::int64_t>()),
                      f.contains("scale") ? rational_from_json(f.at("scale")) : Rational(1)});
      return torus_product(fs, norm);
    }
    std::vector<Point> pts;
    for (auto& p : j.at("points")) pts.push_back(rationals_from_json(p));
    return FiniteNet::torus(std::move(pts), rationals_from_json(j.at("scales")), norm);
  }
  if (kind == "ultrametric") {
    FiniteNet net = ultrametric_chain(j.at("orders").get<std::vector<std::int64_t>>(),
                                      rationals_from_json(j.at("weights")));
    if (!j.contains("points")) return net;
    std::vector<Point> pts;
    for (auto& p : j.at("points")) pts.push_back(rationals_from_json(p));
    return net.with_points(std::move(pts));
  }
  if (kind == "matrix") {
    std::vector<Rational> m;
    for (auto& row : j.at("matrix"))
      for (auto& v : row) m.push_back(rational_from_json(v));
    return FiniteNet::explicit_matrix(j.at("labels").get<std::vector<std::string>>(), std::move(m));
  }
  throw ValidationError("unknown space kind '" + kind + "'");
}

json to_json(const ActionSystem& sys) {
  json gens = json::array();
  auto labels = sys.basic_labels();
  for (std::size_t b = 0; b < labels.size(); ++b)
    gens.push_back({{"label", labels[b]}, {"map", sys.basic_maps()[b].to_json()}});
  return {{"group", to_json(sys.group())}, {"space", to_json(sys.space())}, {"generators", gens}};
}

ActionSystem action_from_json(const json& j) {
  GroupSpec G = group_from_json(j.at("group"));
  FiniteNet space = net_from_json(j.at("space"));
  // Build the label order expected by the constructor.
  std::vector<std::string> wanted;
  if (G.kind() == GroupKind::InfiniteDihedral) {
    wanted = G.marking() == DihedralMarking::Reflections ? std::vector<std::string>{"r", "r'"}
                                                         : std::vector<std::string>{"eps", "r"};
  } else {
    for (std::size_t i = 0; i < G.orders().size(); ++i)
      if (G.orders()[i] != 1) wanted.push_back("g" + std::to_string(i + 1));
  }
  std::vector<std::optional<GeneratorMap>> maps(wanted.size());
  for (auto& g : j.at("generators")) {
    const std::string label = g.at("label").get<std::string>();
    auto it = std::find(wanted.begin(), wanted.end(), label);
    if (it == wanted.end()) throw ValidationError("no basic generator labelled '" + label + "'");
    maps[static_cast<std::size_t>(it - wanted.begin())] = GeneratorMap::from_json(g.at("map"));
  }
  std::vector<GeneratorMap> out;
  for (std::size_t b = 0; b < maps.size(); ++b) {
    if (!maps[b]) throw ValidationError("missing map for generator '" + wanted[b] + "'");
    out.push_back(*maps[b]);
  }
  return ActionSystem(std::move(G), std::move(space), std::move(out));
}

// ---------------------------------------------------------------- domains

bool DomainAction::closed() const {
  for (const auto& row : images)
    for (auto v : row)
      if (v == kNone) return false;
  return true;
}

DomainAction restrict_to(const ActionSystem& sys, const FiniteNet& domain) {
  DomainAction da;
  const std::size_t G = sys.group().generators().size();
  da.images.assign(G, std::vector<std::uint32_t>(domain.size(), DomainAction::kNone));
  for (std::size_t g = 0; g < G; ++g)
    for (std::size_t i = 0; i < domain.size(); ++i) {
      auto at = domain.index_of(sys.apply_generator(g, domain.point(i)));
      if (at) da.images[g][i] = static_cast<std::uint32_t>(*at);
    }
  return da;
}

FiniteNet orbit_closure(const ActionSystem& sys, const std::vector<Point>& seeds, std::uint64_t R,
                        std::size_t cap) {
  std::set<Point> seen(seeds.begin(), seeds.end());
  std::vector<Point> frontier(seen.begin(), seen.end());
  const std::size_t G = sys.group().generators().size();
  for (std::uint64_t step = 0; step < R && !frontier.empty(); ++step) {
    std::vector<Point> next;
    for (const auto& p : frontier)
      for (std::size_t g = 0; g < G; ++g) {
        Point q = sys.apply_generator(g, p);
        if (seen.insert(q).second) {
          if (seen.size() > cap) throw CapacityError("orbit closure exceeds cap", cap);
          next.push_back(std::move(q));
        }
      }
    frontier = std::move(next);
  }
  return sys.space().with_points(std::vector<Point>(seen.begin(), seen.end()));
}

std::vector<FreeViolation> check_free_at_scale(const ActionSystem& sys, std::uint64_t R,
                                               const FiniteNet& domain, std::size_t cap) {
  std::vector<FreeViolation> out;
  const Word e = sys.group().identity();
  for (const auto& w : ball(sys.group(), R, cap)) {
    if (w == e) continue;
    for (std::size_t i = 0; i < domain.size(); ++i)
      if (sys.apply(w, domain.point(i)) == domain.point(i)) out.push_back({w, domain.point(i)});
  }
  return out;
}

// ---------------------------------------------------------------- change of metric

Rational MetricChange::eval(const Rational& r) const {
  if (breakpoints.empty() || r <= 0) return 0;
  const std::size_t N = breakpoints.size() - 1;
  Rational hi_val = 1;
  for (std::size_t n = 0; n < N; ++n) {
    const Rational& cn = breakpoints[n];
    const Rational& cn1 = breakpoints[n + 1];
    if (r >= cn1) {
      Rational lo_val = hi_val / 2;
      return lo_val + (r - cn1) * (hi_val - lo_val) / (cn - cn1);
    }
    hi_val /= 2;
  }
  return r * hi_val / breakpoints[N];
}

MetricChange change_of_metric(const ActionSystem& sys, const FiniteNet& domain) {
  const std::size_t n = domain.size();
  DomainAction da = restrict_to(sys, domain);
  if (!da.closed()) throw ClosureError("change_of_metric needs a generator-invariant domain");
  const std::size_t G = da.images.size();
  for (std::size_t g = 0; g < G; ++g) {
    std::vector<char> hit(n, 0);
    for (auto v : da.images[g]) {
      if (hit[v]) throw DegenerateActionError("generator collapses two domain points");
      hit[v] = 1;
    }
  }
  std::vector<Rational> d0(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d0[i * n + j] = domain.distance(i, j);

  MetricChange out{domain, {}, Rational(1), true};
  if (n < 2) {
    out.max_generator_ratio = 0;
    return out;
  }
  Rational c0 = 0, m = -1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const Rational& v = d0[i * n + j];
      if (v > c0) c0 = v;
      if (m < 0 || v < m) m = v;
    }
  out.breakpoints.push_back(c0);
  while (out.breakpoints.back() >= m) {
    const Rational cn = out.breakpoints.back();
    Rational next = cn / 3;
    for (std::size_t g = 0; g < G; ++g)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          if (d0[i * n + j] < cn) continue;
          const Rational& v = d0[da.images[g][i] * n + da.images[g][j]];
          if (v == 0) throw DegenerateActionError("generator collapses two domain points");
          if (v < next) next = v;
        }
    out.breakpoints.push_back(next);
  }

  // slopes from the outermost segment inwards must be positive and nondecreasing
  const std::size_t N = out.breakpoints.size() - 1;
  Rational prev_slope = 0, val = 1;
  for (std::size_t k = 0; k < N; ++k) {
    Rational slope = (val / 2) / (out.breakpoints[k] - out.breakpoints[k + 1]);
    if (slope <= 0 || slope < prev_slope) out.concave_increasing = false;
    prev_slope = slope;
    val /= 2;
  }
  Rational tail = val / out.breakpoints[N];
  if (tail <= 0 || tail < prev_slope) out.concave_increasing = false;
  if (out.eval(0) != 0) out.concave_increasing = false;

  std::vector<Rational> dn(n * n);
  for (std::size_t i = 0; i < n * n; ++i) dn[i] = out.eval(d0[i]);
  Rational worst = 0;
  for (std::size_t g = 0; g < G; ++g)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        Rational r = dn[da.images[g][i] * n + da.images[g][j]] / dn[i * n + j];
        if (r > worst) worst = r;
      }
  out.max_generator_ratio = worst;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(domain.label(i));
  out.net = FiniteNet::explicit_matrix(std::move(labels), std::move(dn));
  return out;
}

}  // namespace warpcone

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "warpcone/groups.hpp"
#include "warpcone/spaces.hpp"

namespace warpcone {

enum class MapType { Rotation, Reflection, Translation, Permutation, PlConjugate };

// Exact bijection of a space; powers are evaluated in closed form.
//  Rotation      z -> z + angle (per coordinate on a torus)
//  Reflection    z -> center - z (per coordinate)
//  Translation   digit-wise addition mod the ultrametric orders
//  Permutation   index permutation of a matrix net
//  PlConjugate   h o (z -> z + angle) o h^-1 for a piecewise-linear circle homeomorphism h
class GeneratorMap {
 public:
  static GeneratorMap rotation(std::vector<Rational> angle);
  static GeneratorMap reflection(std::vector<Rational> center);
  static GeneratorMap translation(std::vector<std::int64_t> shift);
  static GeneratorMap permutation(std::vector<std::size_t> images);
  // breaks: (x, h(x)) pairs with 0 < x < 1 increasing; h(0) = 0 is implied.
  static GeneratorMap pl_conjugate(Rational angle, std::vector<std::pair<Rational, Rational>> breaks);

  MapType type() const noexcept { return type_; }
  // s^n applied to p; n may be negative.
  Point apply_power(const Point& p, std::int64_t n, const FiniteNet& space) const;
  GeneratorMap inverse() const;
  bool is_involution() const noexcept { return type_ == MapType::Reflection; }

  const std::vector<Rational>& values() const noexcept { return values_; }
  const std::vector<std::int64_t>& shift() const noexcept { return shift_; }
  const std::vector<std::size_t>& images() const noexcept { return images_; }
  const std::vector<std::pair<Rational, Rational>>& breaks() const noexcept { return breaks_; }

  nlohmann::json to_json() const;
  static GeneratorMap from_json(const nlohmann::json& j);

 private:
  MapType type_ = MapType::Rotation;
  std::vector<Rational> values_;  // angle or center
  std::vector<std::int64_t> shift_;
  std::vector<std::size_t> images_;
  std::vector<std::size_t> inverse_images_;
  std::vector<std::pair<Rational, Rational>> breaks_;  // includes (0,0) and (1,1)
};

// Piecewise-linear circle homeomorphism fixing 0, given by its breakpoints.
Rational pl_eval(const std::vector<std::pair<Rational, Rational>>& breaks, const Rational& x);
Rational pl_inverse(const std::vector<std::pair<Rational, Rational>>& breaks, const Rational& y);

// Action of a marked group on a space through maps for its basic generators:
//  abelian kinds: one map per factor with nontrivial order (the positive generator g_i);
//  dihedral {r, r'}: maps for r and r'; dihedral {eps, r}: maps for eps and r.
class ActionSystem {
 public:
  ActionSystem(GroupSpec group, FiniteNet space, std::vector<GeneratorMap> basic_maps);

  const GroupSpec& group() const noexcept { return group_; }
  const FiniteNet& space() const noexcept { return space_; }
  const std::vector<GeneratorMap>& basic_maps() const noexcept { return maps_; }
  std::vector<std::string> basic_labels() const;

  // Exact image of an arbitrary point of the ambient space.
  Point apply(const Word& g, const Point& x) const;
  // Image of a marked generator (index into group().generators()).
  Point apply_generator(std::size_t gen, const Point& x) const;
  // Walks a fixed generator spelling of g and throws ClosureError if a prefix leaves `domain`.
  std::size_t apply_in(const Word& g, std::size_t x, const FiniteNet& domain) const;

  // Verified on `domain`; the results are recorded on the system.
  bool verify_isometric(const FiniteNet& domain);
  Rational verify_lipschitz(const FiniteNet& domain);
  std::optional<bool> isometric() const noexcept { return isometric_; }
  std::optional<Rational> lipschitz() const noexcept { return lipschitz_; }

  // Same maps over scale(space, t); verified flags carry over.
  ActionSystem scaled(const Rational& t) const;

  // Spelling of g as marked generator indices, rightmost applied first.
  std::vector<std::size_t> spelling(const Word& g) const;

 private:
  GroupSpec group_;
  FiniteNet space_;
  std::vector<GeneratorMap> maps_;
  std::vector<std::optional<std::size_t>> basic_of_;  // marked generator -> basic map
  std::vector<bool> inverted_;
  std::optional<bool> isometric_;
  std::optional<Rational> lipschitz_;
};

nlohmann::json to_json(const ActionSystem& sys);
ActionSystem action_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FiniteNet& net);
FiniteNet net_from_json(const nlohmann::json& j);

// Generators as index permutations of a finite domain; kNone marks an image outside it.
struct DomainAction {
  static constexpr std::uint32_t kNone = 0xffffffffu;
  std::vector<std::vector<std::uint32_t>> images;  // per marked generator
  bool closed() const;
};
DomainAction restrict_to(const ActionSystem& sys, const FiniteNet& domain);

// Smallest set containing seeds closed under ball(R), as a net with the ambient distance.
FiniteNet orbit_closure(const ActionSystem& sys, const std::vector<Point>& seeds, std::uint64_t R,
                        std::size_t cap = kDefaultBallCap);

struct FreeViolation {
  Word word;
  Point point;
};
// Nontrivial words of length <= R fixing a domain point, ordered by (word, point index).
std::vector<FreeViolation> check_free_at_scale(const ActionSystem& sys, std::uint64_t R,
                                               const FiniteNet& domain,
                                               std::size_t cap = kDefaultBallCap);

struct MetricChange {
  FiniteNet net;                        // c o d0 on the domain
  std::vector<Rational> breakpoints;    // c_0 > c_1 > ... > c_N
  Rational max_generator_ratio;         // max d(sx,sy)/d(x,y) in the new metric
  bool concave_increasing = false;      // checked at the breakpoints
  Rational eval(const Rational& r) const;
};
// Throws DegenerateActionError if a generator collapses two domain points.
MetricChange change_of_metric(const ActionSystem& sys, const FiniteNet& domain);

}  // namespace warpcone

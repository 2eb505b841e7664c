#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "warpcone/metric.hpp"
#include "warpcone/warped.hpp"

namespace warpcone {

// Classes of the transitive closure of d < R on a subset.
struct ComponentDecomposition {
  Rational R;
  std::vector<std::vector<std::size_t>> parts;  // sorted; ordered by first element
  std::vector<Rational> diameter;               // per part
  Rational max_diameter() const;
};
ComponentDecomposition r_components(const IndexedMetric& m, const std::vector<std::size_t>& subset,
                                    const Rational& R, Exec exec = Exec::Serial);
ComponentDecomposition r_components(const IndexedMetric& m, const Rational& R,
                                    Exec exec = Exec::Serial);

// Farthest-point ordering from index 0 (ties to the smaller index), stopped once the
// next point is closer than `stop` to the chosen set.
std::vector<std::size_t> farthest_point_order(const IndexedMetric& m,
                                              std::optional<Rational> stop = std::nullopt,
                                              Exec exec = Exec::Serial);

struct VnResult {
  Rational N;
  std::vector<std::size_t> greedy;  // N-separated, in selection order
  std::optional<std::size_t> exact;
  std::vector<std::size_t> exact_set;
};
VnResult vn_invariant(const IndexedMetric& m, const Rational& N, std::size_t exact_cap = 64,
                      Exec exec = Exec::Serial);
// Pairwise distances of `set` are all >= N.
bool is_separated(const IndexedMetric& m, const std::vector<std::size_t>& set, const Rational& N);

struct CoverCertificate {
  Rational R;
  std::size_t colors = 1;
  std::vector<std::size_t> color;  // per point
  Rational S;                      // max R-component diameter over the colors
};
// Recomputes S from scratch; nullopt when the coloring is malformed.
std::optional<Rational> verify_cover(const IndexedMetric& m, const CoverCertificate& c,
                                     Exec exec = Exec::Serial);

struct CoverSearch {
  CoverCertificate best;
  bool found = false;  // best.S <= S_max (always when S_max is unset)
  std::size_t swaps = 0;
};
// Block coloring along the farthest-point order (blocks of radius `block`, default 3R/4),
// then single-point recolorings while S improves, up to `budget` of them.
CoverSearch asdim_cover_search(const IndexedMetric& m, const Rational& R, std::size_t d,
                               std::size_t budget = 1000,
                               std::optional<Rational> S_max = std::nullopt,
                               std::optional<Rational> block = std::nullopt);

struct PropAProbe {
  Rational value;  // max l1 distance between the normalized ball indicators
  std::size_t a = 0, b = 0;
  std::size_t pairs = 0;
  bool witnesses(const Rational& R) const { return R > 0 && value * R <= 1; }
};
// Over pairs with d(x, x') <= R, balls closed of radius S >= R.
PropAProbe prop_a_ball_average(const IndexedMetric& m, const Rational& R, const Rational& S,
                               Exec exec = Exec::Serial);

nlohmann::json to_json(const ComponentDecomposition& c);
nlohmann::json to_json(const CoverCertificate& c);
nlohmann::json to_json(const VnResult& v);
CoverCertificate cover_from_json(const nlohmann::json& j);

// Sweep rows such as (t, R, value) under a header line.
void write_sweep_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows, std::ostream& out);

}  // namespace warpcone

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "warpcone/actions.hpp"
#include "warpcone/metric.hpp"

namespace warpcone {

enum class WarpMethod {
  ClosedForm,  // min over the group ball of |g| + t d(gx, y), isometric systems
  Infimum,     // the same formula for arbitrary Lipschitz systems (D_Gamma)
  Graph,       // shortest paths with t d edges and unit generator jumps
  OrbitNet,    // closed form on an orbit of a free abelian rotation system
};

enum class Exec { Serial, Parallel };

std::string to_string(WarpMethod m);

// Warped distances on a finite domain at scale t, as integer numerators over den().
// Rows are computed on first use (once per row, safe for concurrent readers) or all at once.
class WarpedLevel final : public IndexedMetric {
 public:
  struct Impl;

  std::size_t size() const override;
  Rational distance(std::size_t i, std::size_t j) const override;
  const FixedView* fixed() const override;
  std::string label(std::size_t i) const override;

  const Rational& t() const;
  const FiniteNet& domain() const;
  WarpMethod method() const;
  const BigInt& den() const;
  // Numerator of t d(i, j) over den().
  int128 base_num(std::size_t i, std::size_t j) const;

  int128 num(std::size_t i, std::size_t j) const;
  // Exact numerator when it is below `cap`; otherwise some value >= cap.
  int128 num_below(std::size_t i, std::size_t j, int128 cap) const;
  const std::vector<int128>& row(std::size_t i) const;
  void materialize(Exec exec = Exec::Parallel) const;

  // Graph method: largest number of generator jumps on a chosen shortest path.
  std::size_t max_jumps() const;
  // Orbit-net method: point i is orbit_words()[i] applied to seed orbit_seeds()[i].
  const std::vector<Word>& orbit_words() const;
  const std::vector<std::size_t>& orbit_seeds() const;

  // Rational table, row-major (materializes).
  std::vector<Rational> table(Exec exec = Exec::Parallel) const;

 private:
  explicit WarpedLevel(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
  friend WarpedLevel warped_closed_form_level(const ActionSystem&, const Rational&,
                                              const FiniteNet&, std::size_t);
  friend WarpedLevel infimum_level(const ActionSystem&, const Rational&, const FiniteNet&,
                                   std::size_t);
  friend WarpedLevel warped_distance_graph(const ActionSystem&, const Rational&, const FiniteNet&,
                                           std::optional<std::uint64_t>, Exec);
  friend WarpedLevel orbit_net_level(const ActionSystem&, const Rational&,
                                     const std::vector<Point>&, std::uint64_t, std::size_t);
  std::shared_ptr<Impl> impl_;
};

// Isometric systems only; any domain of circle/torus points for rotation/reflection maps,
// otherwise a generator-invariant domain.
WarpedLevel warped_closed_form_level(const ActionSystem& sys, const Rational& t,
                                     const FiniteNet& domain, std::size_t cap = kDefaultBallCap);
// Same formula without the isometry requirement; invariant domain.
WarpedLevel infimum_level(const ActionSystem& sys, const Rational& t, const FiniteNet& domain,
                          std::size_t cap = kDefaultBallCap);
// All-pairs shortest paths on an invariant domain (dense Dijkstra per source).
// Throws ClosureError when a chosen path needs more than R_path generator jumps.
WarpedLevel warped_distance_graph(const ActionSystem& sys, const Rational& t,
                                  const FiniteNet& domain,
                                  std::optional<std::uint64_t> R_path = std::nullopt,
                                  Exec exec = Exec::Parallel);
// Orbits {g.seed : |g| <= R} of a free abelian rotation system with the exact closed form.
// Distances are looked up from per-seed-pair tables, so nothing quadratic is stored.
WarpedLevel orbit_net_level(const ActionSystem& sys, const Rational& t,
                            const std::vector<Point>& seeds, std::uint64_t R,
                            std::size_t cap = kDefaultBallCap);

// Serial exact references.
Rational warped_distance_closed_form(const ActionSystem& sys, const Rational& t, const Point& x,
                                     const Point& y, const FiniteNet* domain = nullptr,
                                     std::size_t cap = kDefaultBallCap);
Rational d_gamma_infimum(const ActionSystem& sys, const Rational& t, const Point& x,
                         const Point& y, std::size_t cap = kDefaultBallCap);
std::vector<Rational> graph_reference(const ActionSystem& sys, const Rational& t,
                                      const FiniteNet& domain);

// Minimal word length carrying x to y, or nullopt when no word within the cap does.
std::optional<std::uint64_t> stabilized_distance(const ActionSystem& sys, const Point& x,
                                                 const Point& y, std::size_t cap = 100'000);

// true iff ratio <= L^e, decided exactly for rational e >= 0.
bool power_bound_holds(const Rational& ratio, const Rational& L, const Rational& e);

// Gamma x domain with d1((g,x),(h,y)) = |h g^-1| + t d(x, y) and pi(g, x) = g x.
struct CoveringPoint {
  Word gamma;
  std::size_t y;
};

class CoveringLevel {
 public:
  CoveringLevel(const ActionSystem& sys, Rational t, FiniteNet domain, std::uint64_t R_max,
                std::size_t cap = kDefaultBallCap);

  const Rational& t() const noexcept { return t_; }
  std::uint64_t R_max() const noexcept { return R_max_; }
  const FiniteNet& domain() const noexcept { return domain_; }
  const ActionSystem& system() const noexcept { return sys_; }
  const std::vector<Word>& ball() const noexcept { return ball_; }
  std::size_t size() const noexcept { return ball_.size() * domain_.size(); }
  CoveringPoint point(std::size_t k) const;

  Rational d1(const CoveringPoint& a, const CoveringPoint& b) const;
  std::size_t project(const CoveringPoint& p) const;
  // Materialized d1 table; CapacityError above `cap` points.
  std::vector<Rational> d1_table(std::size_t cap = 4096) const;

 private:
  ActionSystem sys_;
  Rational t_;
  FiniteNet domain_;
  std::uint64_t R_max_;
  std::vector<Word> ball_;
};

// Throws UnsupportedError unless the system is verified isometric.
CoveringLevel covering_level(const ActionSystem& sys, const Rational& t, const FiniteNet& domain,
                             std::uint64_t R_max);

struct FaithfulnessReport {
  std::uint64_t radius = 0;
  std::uint64_t probe = 0;
  // First violation by (level, center, pair); absent when radius == probe.
  std::optional<CoveringPoint> witness_a, witness_b;
  Rational violation_level = 0;  // both witnesses lie in the closed ball of this radius
  Rational witness_d1 = 0, witness_warped = 0;
};

FaithfulnessReport faithfulness_radius(const CoveringLevel& cov, const WarpedLevel& warped,
                                       std::uint64_t R_probe, Exec exec = Exec::Parallel);
// Checks one pair of covering points; true if pi fails to preserve their distance.
bool is_faithfulness_violation(const CoveringLevel& cov, const WarpedLevel& warped,
                               const CoveringPoint& a, const CoveringPoint& b);

// Stable 64-bit content hash (FNV-1a).
std::uint64_t content_hash(const std::string& s);
std::uint64_t level_hash(const ActionSystem& sys, const Rational& t, const FiniteNet& domain);

void write_level_csv(const WarpedLevel& level, std::ostream& out);
void save_level_cache(const WarpedLevel& level, std::uint64_t key, const std::string& path);
// Returns the row-major numerators and denominator if the file holds `key`.
std::optional<std::pair<std::vector<int128>, BigInt>> load_level_cache(const std::string& path,
                                                                      std::uint64_t key);

}  // namespace warpcone

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "warpcone/metric.hpp"
#include "warpcone/rational.hpp"

namespace warpcone {

enum class NetKind { CircleQ, TorusProduct, UltrametricChain, ExplicitMatrix };

enum class TorusNorm { L1, LInf };

// Fixed-point distance data of a net: numerators over `den`.
class NetFixed final : public FixedView {
 public:
  const BigInt& den() const override { return den_; }
  int128 num(std::size_t i, std::size_t j) const override;

  // Per-coordinate residues (circle/torus) or digits (ultrametric), row-major.
  std::size_t coords = 0;
  std::vector<std::int64_t> residues;
  std::vector<std::int64_t> coord_den;
  std::vector<int128> weight;
  std::vector<int128> matrix;  // explicit nets, full matrix indexed through orig
  std::vector<std::size_t> orig;
  std::size_t full_n = 0;
  NetKind kind = NetKind::CircleQ;
  TorusNorm norm = TorusNorm::L1;
  std::size_t n = 0;
  BigInt den_;
};

// Finite point set with exact coordinates and exact distance. Immutable; copies share state.
//
//  CircleQ           points (x) with x in [0,1), distance scale * arc(x, y)
//  TorusProduct      points (x_1..x_k), distance sum_c scale_c * arc(x_c, y_c) (or max for LInf)
//  UltrametricChain  digit strings, distance weight_j at the first differing level j
//  ExplicitMatrix    points (i) indexing the rows of a square matrix; subnets keep the indices
class FiniteNet final : public IndexedMetric {
 public:
  static FiniteNet circle(std::vector<Rational> points, Rational scale = 1);
  static FiniteNet torus(std::vector<Point> points, std::vector<Rational> scales,
                         TorusNorm norm = TorusNorm::L1);
  static FiniteNet ultrametric(std::vector<std::int64_t> orders, std::vector<Rational> weights);
  static FiniteNet explicit_matrix(std::vector<std::string> labels, std::vector<Rational> matrix);

  NetKind kind() const noexcept { return s_->kind; }
  std::size_t size() const override { return s_->points.size(); }
  const Point& point(std::size_t i) const { return s_->points.at(i); }
  const std::vector<Point>& points() const noexcept { return s_->points; }
  std::optional<std::size_t> index_of(const Point& p) const;
  std::string label(std::size_t i) const override;

  Rational distance(std::size_t i, std::size_t j) const override;
  // Ambient distance between arbitrary coordinates of the same kind.
  Rational distance_between(const Point& a, const Point& b) const;
  const FixedView* fixed() const override;

  // Scale factors per coordinate (circle: one entry).
  const std::vector<Rational>& scales() const noexcept { return s_->scales; }
  TorusNorm norm() const noexcept { return s_->norm; }
  const std::vector<std::int64_t>& orders() const noexcept { return s_->orders; }
  const std::vector<Rational>& weights() const noexcept { return s_->weights; }
  std::size_t dimension() const noexcept;

  Rational diameter() const;
  Rational min_positive_distance() const;

  // Distance matrix materialized on first use; row-wise once-init, safe for concurrent readers.
  const std::vector<Rational>& row(std::size_t i) const;

  FiniteNet with_points(std::vector<Point> points) const;

 private:
  struct State {
    NetKind kind = NetKind::CircleQ;
    std::vector<Point> points;
    std::vector<Rational> scales;
    TorusNorm norm = TorusNorm::L1;
    std::vector<std::int64_t> orders;
    std::vector<Rational> weights;
    std::vector<Rational> matrix;
    std::size_t full_n = 0;
    std::vector<std::string> labels;
    std::map<Point, std::size_t> index;

    mutable std::once_flag fixed_once;
    mutable std::unique_ptr<NetFixed> fixed;
    mutable std::unique_ptr<std::once_flag[]> row_once;
    mutable std::vector<std::vector<Rational>> rows;
  };
  explicit FiniteNet(std::shared_ptr<State> s);
  static std::shared_ptr<State> finish(std::shared_ptr<State> s);
  friend FiniteNet scale(const FiniteNet& net, const Rational& t);

  std::shared_ptr<const State> s_;
};

// {k/denominator} together with `extra` points, deduplicated and sorted.
FiniteNet circle_net(std::int64_t denominator, const std::vector<Rational>& extra = {});

// Same net with every distance multiplied by t > 0.
FiniteNet scale(const FiniteNet& net, const Rational& t);

struct TorusFactor {
  FiniteNet circle;
  Rational scale;
};
// Cartesian product of circle nets with the l1 (default) or l-infinity combination.
FiniteNet torus_product(const std::vector<TorusFactor>& factors, TorusNorm norm = TorusNorm::L1);

FiniteNet ultrametric_chain(const std::vector<std::int64_t>& orders,
                            const std::vector<Rational>& weights);

// Rejects non-reduced input such as "2/4" and values outside [0, 1).
Rational parse_circle_coordinate(const std::string& s);

struct MetricCheck {
  bool ok = true;
  std::string violation;
  std::size_t triples_checked = 0;
};
// Exhaustive triangle checks up to `exhaustive_limit` points, otherwise `samples` random triples.
MetricCheck check_metric(const IndexedMetric& m, std::size_t exhaustive_limit = 200,
                         std::size_t samples = 10'000, std::uint64_t seed = 1);
MetricCheck check_strong_triangle(const IndexedMetric& m);

// Quotient of a net by a partition into finite-group orbits.
class QuotientNet final : public IndexedMetric {
 public:
  std::size_t size() const override { return orbits_.size(); }
  Rational distance(std::size_t a, std::size_t b) const override;
  const FixedView* fixed() const override { return fixed_.get(); }
  std::string label(std::size_t a) const override;

  const FiniteNet& base() const noexcept { return base_; }
  const std::vector<std::vector<std::size_t>>& orbits() const noexcept { return orbits_; }
  std::size_t class_of(std::size_t point) const { return class_of_.at(point); }
  // The quotient as an ExplicitMatrix net over the classes.
  FiniteNet as_net() const;

 private:
  friend QuotientNet quotient_by_finite_group(const FiniteNet&,
                                              const std::vector<std::vector<std::size_t>>&);
  class Fixed;
  explicit QuotientNet(FiniteNet base) : base_(std::move(base)) {}
  FiniteNet base_;
  std::vector<std::vector<std::size_t>> orbits_;
  std::vector<std::size_t> class_of_;
  std::vector<Rational> dist_;
  std::shared_ptr<FixedView> fixed_;
};

// Throws MetricError when the quotient distance violates the triangle inequality.
QuotientNet quotient_by_finite_group(const FiniteNet& net,
                                     const std::vector<std::vector<std::size_t>>& orbits);

// Level maps e_i : G_i -> H_i between cumulative chains (|G_i| = g_i, G_i = Z/g_i with
// quotient maps x -> x mod g_{i-1}) satisfying q o e_i = e_{i-1} o q.
struct InterleavedEmbedding {
  std::vector<std::int64_t> source_orders;
  std::vector<std::int64_t> target_orders;
  std::vector<std::vector<std::int64_t>> maps;  // maps[i][x] = e_{i+1}(x)
};
InterleavedEmbedding interleaved_embedding(const std::vector<std::int64_t>& source_orders,
                                           const std::vector<std::int64_t>& target_orders);
// Exhaustive: injectivity and compatibility on every level.
bool verify_interleaved(const InterleavedEmbedding& e);
// Checks that the embedding is isometric between the ultrametrics a_j on both chains.
bool embedding_is_isometric(const InterleavedEmbedding& e, const std::vector<Rational>& weights);

// CSV: header of point labels, then a square matrix of "p/q" rationals.
FiniteNet load_matrix_csv(std::istream& in);
void save_matrix_csv(const IndexedMetric& m, std::ostream& out);

}  // namespace warpcone

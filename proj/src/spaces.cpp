#include "warpcone/spaces.hpp"

#include <algorithm>
#include <istream>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>

#include "warpcone/errors.hpp"

namespace warpcone {

namespace {

// Fixed-point tables are abandoned above this magnitude so that path sums stay in range.
const BigInt kFixedLimit = BigInt(1) << 100;

void check_circle_coordinate(const Rational& x) {
  if (x < 0 || x >= 1) throw ValidationError("circle coordinate out of [0,1): " + to_string(x));
}

std::int64_t abs64(std::int64_t v) { return v < 0 ? -v : v; }

std::size_t orig_index(const Point& p) { return static_cast<std::size_t>(to_int64(numer(p.at(0)))); }

}  // namespace

int128 NetFixed::num(std::size_t i, std::size_t j) const {
  switch (kind) {
    case NetKind::CircleQ:
    case NetKind::TorusProduct: {
      const std::int64_t* a = &residues[i * coords];
      const std::int64_t* b = &residues[j * coords];
      int128 acc = 0;
      for (std::size_t c = 0; c < coords; ++c) {
        std::int64_t d = abs64(a[c] - b[c]);
        d = std::min(d, coord_den[c] - d);
        int128 v = weight[c] * d;
        if (norm == TorusNorm::L1)
          acc += v;
        else
          acc = std::max(acc, v);
      }
      return acc;
    }
    case NetKind::UltrametricChain: {
      const std::int64_t* a = &residues[i * coords];
      const std::int64_t* b = &residues[j * coords];
      for (std::size_t c = 0; c < coords; ++c)
        if (a[c] != b[c]) return weight[c];
      return 0;
    }
    case NetKind::ExplicitMatrix:
      return matrix[orig[i] * full_n + orig[j]];
  }
  return 0;
}

FiniteNet::FiniteNet(std::shared_ptr<State> s) : s_(std::move(s)) {}

std::shared_ptr<FiniteNet::State> FiniteNet::finish(std::shared_ptr<State> s) {
  for (std::size_t i = 0; i < s->points.size(); ++i) {
    auto [it, fresh] = s->index.emplace(s->points[i], i);
    if (!fresh) throw ValidationError("duplicate net point " + point_label(s->points[i]));
  }
  s->row_once = std::make_unique<std::once_flag[]>(s->points.size());
  s->rows.resize(s->points.size());
  return s;
}

FiniteNet FiniteNet::circle(std::vector<Rational> points, Rational scale) {
  if (scale <= 0) throw ValidationError("scale must be positive");
  auto s = std::make_shared<State>();
  s->kind = NetKind::CircleQ;
  for (auto& x : points) {
    check_circle_coordinate(x);
    s->points.push_back(Point{x});
  }
  s->scales = {scale};
  return FiniteNet(finish(std::move(s)));
}

FiniteNet FiniteNet::torus(std::vector<Point> points, std::vector<Rational> scales, TorusNorm norm) {
  if (scales.empty()) throw ValidationError("torus needs at least one coordinate");
  for (auto& sc : scales)
    if (sc <= 0) throw ValidationError("torus scales must be positive");
  for (auto& p : points) {
    if (p.size() != scales.size()) throw ValidationError("torus point has wrong dimension");
    for (auto& x : p) check_circle_coordinate(x);
  }
  auto s = std::make_shared<State>();
  s->kind = NetKind::TorusProduct;
  s->points = std::move(points);
  s->scales = std::move(scales);
  s->norm = norm;
  return FiniteNet(finish(std::move(s)));
}

FiniteNet FiniteNet::ultrametric(std::vector<std::int64_t> orders, std::vector<Rational> weights) {
  if (orders.size() != weights.size()) throw ValidationError("orders and weights differ in length");
  if (orders.empty()) throw ValidationError("ultrametric chain needs at least one level");
  for (auto o : orders)
    if (o < 1) throw ValidationError("ultrametric orders must be positive");
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] <= 0) throw ValidationError("ultrametric weights must be positive");
    if (j > 0 && weights[j] >= weights[j - 1])
      throw ValidationError("ultrametric weights must be strictly decreasing");
  }
  std::size_t total = 1;
  for (auto o : orders) {
    if (total > 10'000'000 / static_cast<std::size_t>(o))
      throw CapacityError("ultrametric chain too large", 10'000'000);
    total *= static_cast<std::size_t>(o);
  }
  auto s = std::make_shared<State>();
  s->kind = NetKind::UltrametricChain;
  s->points.reserve(total);
  Point cur(orders.size(), Rational(0));
  std::vector<std::int64_t> digit(orders.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    for (std::size_t j = 0; j < digit.size(); ++j) cur[j] = digit[j];
    s->points.push_back(cur);
    for (std::size_t j = digit.size(); j-- > 0;) {
      if (++digit[j] < orders[j]) break;
      digit[j] = 0;
    }
  }
  s->orders = std::move(orders);
  s->weights = std::move(weights);
  return FiniteNet(finish(std::move(s)));
}

FiniteNet FiniteNet::explicit_matrix(std::vector<std::string> labels, std::vector<Rational> matrix) {
  const std::size_t n = labels.size();
  if (matrix.size() != n * n) throw ValidationError("distance matrix is not square");
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i * n + i] != 0) throw MetricError("nonzero diagonal at " + labels[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (matrix[i * n + j] != matrix[j * n + i])
        throw MetricError("asymmetric entry at " + labels[i] + "," + labels[j]);
      if (matrix[i * n + j] <= 0)
        throw MetricError("nonpositive distance at " + labels[i] + "," + labels[j]);
    }
  }
  auto s = std::make_shared<State>();
  s->kind = NetKind::ExplicitMatrix;
  for (std::size_t i = 0; i < n; ++i) s->points.push_back(Point{Rational(static_cast<long>(i))});
  s->full_n = n;
  s->labels = std::move(labels);
  s->matrix = std::move(matrix);
  FiniteNet net(finish(std::move(s)));
  auto chk = check_metric(net);
  if (!chk.ok) throw MetricError("triangle inequality fails: " + chk.violation);
  return net;
}

std::optional<std::size_t> FiniteNet::index_of(const Point& p) const {
  auto it = s_->index.find(p);
  if (it == s_->index.end()) return std::nullopt;
  return it->second;
}

std::string FiniteNet::label(std::size_t i) const {
  if (s_->kind == NetKind::ExplicitMatrix) return s_->labels.at(orig_index(s_->points.at(i)));
  return point_label(s_->points.at(i));
}

std::size_t FiniteNet::dimension() const noexcept {
  switch (s_->kind) {
    case NetKind::CircleQ: return 1;
    case NetKind::TorusProduct: return s_->scales.size();
    case NetKind::UltrametricChain: return s_->orders.size();
    case NetKind::ExplicitMatrix: return 1;
  }
  return 0;
}

Rational FiniteNet::distance_between(const Point& a, const Point& b) const {
  switch (s_->kind) {
    case NetKind::CircleQ:
      return s_->scales[0] * circle_dist(a.at(0), b.at(0));
    case NetKind::TorusProduct: {
      Rational acc = 0;
      for (std::size_t c = 0; c < s_->scales.size(); ++c) {
        Rational v = s_->scales[c] * circle_dist(a.at(c), b.at(c));
        if (s_->norm == TorusNorm::L1)
          acc += v;
        else if (v > acc)
          acc = v;
      }
      return acc;
    }
    case NetKind::UltrametricChain:
      for (std::size_t j = 0; j < s_->orders.size(); ++j)
        if (a.at(j) != b.at(j)) return s_->weights[j];
      return 0;
    case NetKind::ExplicitMatrix:
      return s_->matrix.at(orig_index(a) * s_->full_n + orig_index(b));
  }
  return 0;
}

Rational FiniteNet::distance(std::size_t i, std::size_t j) const {
  return distance_between(s_->points.at(i), s_->points.at(j));
}

const FixedView* FiniteNet::fixed() const {
  const State& s = *s_;
  std::call_once(s.fixed_once, [&s] {
    auto f = std::make_unique<NetFixed>();
    f->kind = s.kind;
    f->norm = s.norm;
    f->n = s.points.size();
    switch (s.kind) {
      case NetKind::CircleQ:
      case NetKind::TorusProduct: {
        const std::size_t k = s.scales.size();
        f->coords = k;
        std::vector<BigInt> D(k, BigInt(1));
        for (auto& p : s.points)
          for (std::size_t c = 0; c < k; ++c) D[c] = lcm(D[c], denom(p[c]));
        BigInt den = 1;
        for (std::size_t c = 0; c < k; ++c) {
          if (!fits_int64(D[c]) || D[c] > (BigInt(1) << 62)) return;
          den = lcm(den, denom(s.scales[c] / Rational(D[c])));
        }
        BigInt total = 0;
        for (std::size_t c = 0; c < k; ++c) {
          Rational w = s.scales[c] / Rational(D[c]) * Rational(den);
          BigInt wi = numer(w);
          total += wi * D[c];
          if (total > kFixedLimit) return;
          f->weight.push_back(to_int128(wi));
          f->coord_den.push_back(to_int64(D[c]));
        }
        if (den > kFixedLimit) return;
        f->residues.reserve(s.points.size() * k);
        for (auto& p : s.points)
          for (std::size_t c = 0; c < k; ++c)
            f->residues.push_back(to_int64(numer(p[c] * Rational(D[c]))));
        f->den_ = den;
        break;
      }
      case NetKind::UltrametricChain: {
        f->coords = s.orders.size();
        BigInt den = 1;
        for (auto& w : s.weights) den = lcm(den, denom(w));
        if (den > kFixedLimit || numer(s.weights[0] * Rational(den)) > kFixedLimit) return;
        for (auto& w : s.weights) f->weight.push_back(to_int128(numer(w * Rational(den))));
        for (auto& p : s.points)
          for (auto& x : p) f->residues.push_back(to_int64(numer(x)));
        f->den_ = den;
        break;
      }
      case NetKind::ExplicitMatrix: {
        BigInt den = 1;
        for (auto& v : s.matrix) den = lcm(den, denom(v));
        if (den > kFixedLimit) return;
        f->full_n = s.full_n;
        for (auto& p : s.points) f->orig.push_back(orig_index(p));
        f->matrix.reserve(s.matrix.size());
        for (auto& v : s.matrix) {
          BigInt x = numer(v * Rational(den));
          if (x > kFixedLimit) return;
          f->matrix.push_back(to_int128(x));
        }
        f->den_ = den;
        break;
      }
    }
    s.fixed = std::move(f);
  });
  return s.fixed.get();
}

const std::vector<Rational>& FiniteNet::row(std::size_t i) const {
  const State& s = *s_;
  if (i >= s.points.size()) throw ValidationError("row index out of range");
  std::call_once(s.row_once[i], [this, &s, i] {
    std::vector<Rational> r(s.points.size());
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = distance(i, j);
    s.rows[i] = std::move(r);
  });
  return s.rows[i];
}

Rational FiniteNet::diameter() const {
  const std::size_t n = size();
  if (const FixedView* f = fixed()) {
    int128 best = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) best = std::max(best, f->num(i, j));
    return Rational(from_int128(best), f->den());
  }
  Rational best = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Rational d = distance(i, j);
      if (d > best) best = d;
    }
  return best;
}

Rational FiniteNet::min_positive_distance() const {
  const std::size_t n = size();
  if (n < 2) return 0;
  if (const FixedView* f = fixed()) {
    int128 best = -1;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        int128 v = f->num(i, j);
        if (best < 0 || v < best) best = v;
      }
    return Rational(from_int128(best), f->den());
  }
  Rational best = distance(0, 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Rational d = distance(i, j);
      if (d < best) best = d;
    }
  return best;
}

FiniteNet FiniteNet::with_points(std::vector<Point> points) const {
  switch (s_->kind) {
    case NetKind::CircleQ: {
      std::vector<Rational> xs;
      xs.reserve(points.size());
      for (auto& p : points) xs.push_back(p.at(0));
      return circle(std::move(xs), s_->scales[0]);
    }
    case NetKind::TorusProduct:
      return torus(std::move(points), s_->scales, s_->norm);
    case NetKind::UltrametricChain:
    case NetKind::ExplicitMatrix:
      break;
  }
  for (auto& p : points) {
    if (p.size() != dimension()) throw ValidationError("point has wrong dimension");
    for (std::size_t j = 0; j < p.size(); ++j) {
      const std::int64_t bound = s_->kind == NetKind::UltrametricChain
                                     ? s_->orders[j]
                                     : static_cast<std::int64_t>(s_->full_n);
      if (denom(p[j]) != 1 || p[j] < 0 || p[j] >= bound)
        throw ValidationError("point " + point_label(p) + " is not in the net");
    }
  }
  auto s = std::make_shared<State>();
  s->kind = s_->kind;
  s->points = std::move(points);
  s->orders = s_->orders;
  s->weights = s_->weights;
  s->matrix = s_->matrix;
  s->full_n = s_->full_n;
  s->labels = s_->labels;
  return FiniteNet(finish(std::move(s)));
}

FiniteNet circle_net(std::int64_t denominator, const std::vector<Rational>& extra) {
  if (denominator < 1) throw ValidationError("denominator must be >= 1");
  std::vector<Rational> xs;
  xs.reserve(static_cast<std::size_t>(denominator) + extra.size());
  for (std::int64_t k = 0; k < denominator; ++k) xs.emplace_back(k, denominator);
  for (auto& x : extra) {
    check_circle_coordinate(x);
    xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return FiniteNet::circle(std::move(xs));
}

FiniteNet scale(const FiniteNet& net, const Rational& t) {
  if (t <= 0) throw ValidationError("scale factor must be positive");
  const auto& src = *net.s_;
  auto s = std::make_shared<FiniteNet::State>();
  s->kind = src.kind;
  s->points = src.points;
  s->norm = src.norm;
  s->orders = src.orders;
  s->labels = src.labels;
  s->full_n = src.full_n;
  for (auto& v : src.scales) s->scales.push_back(v * t);
  for (auto& v : src.weights) s->weights.push_back(v * t);
  for (auto& v : src.matrix) s->matrix.push_back(v * t);
  return FiniteNet(FiniteNet::finish(std::move(s)));
}

FiniteNet torus_product(const std::vector<TorusFactor>& factors, TorusNorm norm) {
  if (factors.empty()) throw ValidationError("torus_product needs at least one factor");
  std::vector<Rational> scales;
  for (auto& f : factors) {
    if (f.circle.kind() != NetKind::CircleQ) throw ValidationError("torus factors must be circles");
    if (f.scale <= 0) throw ValidationError("torus scales must be positive");
    scales.push_back(f.scale * f.circle.scales()[0]);
  }
  std::size_t total = 1;
  for (auto& f : factors) {
    if (f.circle.size() == 0) return FiniteNet::torus({}, scales, norm);
    if (total > 50'000'000 / f.circle.size())
      throw CapacityError("torus product too large", 50'000'000);
    total *= f.circle.size();
  }
  std::vector<Point> points;
  points.reserve(total);
  std::vector<std::size_t> idx(factors.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    Point p;
    p.reserve(factors.size());
    for (std::size_t c = 0; c < factors.size(); ++c) p.push_back(factors[c].circle.point(idx[c])[0]);
    points.push_back(std::move(p));
    for (std::size_t c = factors.size(); c-- > 0;) {
      if (++idx[c] < factors[c].circle.size()) break;
      idx[c] = 0;
    }
  }
  return FiniteNet::torus(std::move(points), std::move(scales), norm);
}

FiniteNet ultrametric_chain(const std::vector<std::int64_t>& orders,
                            const std::vector<Rational>& weights) {
  return FiniteNet::ultrametric(orders, weights);
}

Rational parse_circle_coordinate(const std::string& s) {
  Rational x = parse_rational(s);
  auto slash = s.find('/');
  if (slash != std::string::npos && BigInt(s.substr(slash + 1)) != denom(x))
    throw ValidationError("coordinate not in lowest terms: " + s);
  check_circle_coordinate(x);
  return x;
}

MetricCheck check_metric(const IndexedMetric& m, std::size_t exhaustive_limit,
                         std::size_t samples, std::uint64_t seed) {
  MetricCheck out;
  const std::size_t n = m.size();
  const FixedView* f = m.fixed();
  auto d = [&](std::size_t i, std::size_t j) -> Rational { return m.distance(i, j); };
  auto fail = [&](std::string why) {
    out.ok = false;
    out.violation = std::move(why);
  };
  auto triple = [&](std::size_t i, std::size_t j, std::size_t k) {
    ++out.triples_checked;
    if (f) {
      if (f->num(i, k) > f->num(i, j) + f->num(j, k)) {
        fail(m.label(i) + " " + m.label(j) + " " + m.label(k));
        return false;
      }
      return true;
    }
    if (d(i, k) > d(i, j) + d(j, k)) {
      fail(m.label(i) + " " + m.label(j) + " " + m.label(k));
      return false;
    }
    return true;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (d(i, i) != 0) {
      fail("nonzero self-distance at " + m.label(i));
      return out;
    }
  }
  if (n <= exhaustive_limit) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) {
          Rational a = d(i, j);
          if (a <= 0 || a != d(j, i)) {
            fail("bad pair " + m.label(i) + " " + m.label(j));
            return out;
          }
        }
        for (std::size_t k = 0; k < n; ++k)
          if (!triple(i, j, k)) return out;
      }
    return out;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t s = 0; s < samples; ++s) {
    std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
    if (i != j && (d(i, j) <= 0 || d(i, j) != d(j, i))) {
      fail("bad pair " + m.label(i) + " " + m.label(j));
      return out;
    }
    if (!triple(i, j, k)) return out;
  }
  return out;
}

MetricCheck check_strong_triangle(const IndexedMetric& m) {
  MetricCheck out;
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        ++out.triples_checked;
        Rational a = m.distance(i, j), b = m.distance(j, k);
        if (m.distance(i, k) > (a > b ? a : b)) {
          out.ok = false;
          out.violation = m.label(i) + " " + m.label(j) + " " + m.label(k);
          return out;
        }
      }
  return out;
}

class QuotientNet::Fixed final : public FixedView {
 public:
  const BigInt& den() const override { return den_; }
  int128 num(std::size_t i, std::size_t j) const override { return table[i * n + j]; }
  BigInt den_;
  std::size_t n = 0;
  std::vector<int128> table;
};

Rational QuotientNet::distance(std::size_t a, std::size_t b) const {
  return dist_.at(a * orbits_.size() + b);
}

std::string QuotientNet::label(std::size_t a) const {
  return "[" + base_.label(orbits_.at(a).front()) + "]";
}

FiniteNet QuotientNet::as_net() const {
  std::vector<std::string> labels;
  for (std::size_t a = 0; a < size(); ++a) labels.push_back(label(a));
  return FiniteNet::explicit_matrix(std::move(labels), dist_);
}

QuotientNet quotient_by_finite_group(const FiniteNet& net,
                                     const std::vector<std::vector<std::size_t>>& orbits) {
  const std::size_t n = net.size();
  std::vector<std::size_t> cls(n, SIZE_MAX);
  for (std::size_t a = 0; a < orbits.size(); ++a) {
    if (orbits[a].empty()) throw ValidationError("empty orbit in partition");
    for (auto p : orbits[a]) {
      if (p >= n) throw ValidationError("orbit index out of range");
      if (cls[p] != SIZE_MAX) throw ValidationError("orbits overlap at " + net.label(p));
      cls[p] = a;
    }
  }
  for (std::size_t p = 0; p < n; ++p)
    if (cls[p] == SIZE_MAX) throw ValidationError("partition misses " + net.label(p));

  QuotientNet q(net);
  q.orbits_ = orbits;
  q.class_of_ = cls;
  const std::size_t k = orbits.size();
  const FixedView* f = net.fixed();
  if (f) {
    auto fx = std::make_shared<QuotientNet::Fixed>();
    fx->den_ = f->den();
    fx->n = k;
    fx->table.assign(k * k, -1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        int128& cell = fx->table[cls[i] * k + cls[j]];
        int128 v = f->num(i, j);
        if (cell < 0 || v < cell) cell = v;
      }
    q.dist_.reserve(k * k);
    for (auto v : fx->table) q.dist_.emplace_back(from_int128(v), fx->den_);
    q.fixed_ = fx;
  } else {
    q.dist_.assign(k * k, Rational(-1));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Rational& cell = q.dist_[cls[i] * k + cls[j]];
        Rational v = net.distance(i, j);
        if (cell < 0 || v < cell) cell = v;
      }
  }
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b)
      if (q.dist_[a * k + b] <= 0)
        throw MetricError("quotient collapses classes " + q.label(a) + " and " + q.label(b));
  auto chk = check_metric(q, 2000);
  if (!chk.ok) throw MetricError("quotient is not a metric: " + chk.violation);
  return q;
}

InterleavedEmbedding interleaved_embedding(const std::vector<std::int64_t>& source_orders,
                                           const std::vector<std::int64_t>& target_orders) {
  if (source_orders.size() != target_orders.size() || source_orders.empty())
    throw ValidationError("chains must have the same positive length");
  std::int64_t gp = 1, hp = 1;
  for (std::size_t i = 0; i < source_orders.size(); ++i) {
    std::int64_t g = source_orders[i], h = target_orders[i];
    if (g < 1 || h < 1 || g % gp != 0 || h % hp != 0)
      throw ValidationError("chain orders must be positive and divide each other");
    if (g / gp > h / hp)
      throw InfeasibleError("index ratio " + std::to_string(g / gp) + " exceeds " +
                                std::to_string(h / hp) + " at level " + std::to_string(i + 1),
                            i + 1);
    gp = g;
    hp = h;
  }
  InterleavedEmbedding e{source_orders, target_orders, {}};
  gp = 1;
  hp = 1;
  std::vector<std::int64_t> prev{0};
  for (std::size_t i = 0; i < source_orders.size(); ++i) {
    std::int64_t g = source_orders[i], h = target_orders[i];
    (void)h;
    std::vector<std::int64_t> cur(static_cast<std::size_t>(g));
    for (std::int64_t x = 0; x < g; ++x) {
      std::int64_t base = x % gp;
      std::int64_t j = x / gp;
      cur[static_cast<std::size_t>(x)] = prev[static_cast<std::size_t>(base)] + j * hp;
    }
    e.maps.push_back(cur);
    prev = std::move(cur);
    gp = g;
    hp = h;
  }
  return e;
}

bool verify_interleaved(const InterleavedEmbedding& e) {
  for (std::size_t i = 0; i < e.maps.size(); ++i) {
    const auto& m = e.maps[i];
    const std::int64_t h = e.target_orders[i];
    std::vector<char> seen(static_cast<std::size_t>(h), 0);
    if (m.size() != static_cast<std::size_t>(e.source_orders[i])) return false;
    for (std::size_t x = 0; x < m.size(); ++x) {
      if (m[x] < 0 || m[x] >= h || seen[static_cast<std::size_t>(m[x])]) return false;
      seen[static_cast<std::size_t>(m[x])] = 1;
      if (i > 0) {
        std::int64_t gp = e.source_orders[i - 1], hp = e.target_orders[i - 1];
        if (m[x] % hp != e.maps[i - 1][x % static_cast<std::size_t>(gp)]) return false;
      }
    }
  }
  return true;
}

bool embedding_is_isometric(const InterleavedEmbedding& e, const std::vector<Rational>& weights) {
  if (weights.size() != e.maps.size()) throw ValidationError("one weight per level required");
  auto dist = [&](const std::vector<std::int64_t>& orders, std::int64_t x,
                  std::int64_t y) -> Rational {
    for (std::size_t j = 0; j < orders.size(); ++j)
      if (x % orders[j] != y % orders[j]) return weights[j];
    return 0;
  };
  const auto& top = e.maps.back();
  for (std::size_t x = 0; x < top.size(); ++x)
    for (std::size_t y = 0; y < top.size(); ++y) {
      auto a = static_cast<std::int64_t>(x), b = static_cast<std::int64_t>(y);
      if (dist(e.source_orders, a, b) != dist(e.target_orders, top[x], top[y])) return false;
    }
  return true;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      out.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell += ch;
    }
  }
  out.push_back(cell);
  for (auto& c : out) {
    while (!c.empty() && c.back() == ' ') c.pop_back();
    while (!c.empty() && c.front() == ' ') c.erase(c.begin());
  }
  return out;
}

std::string csv_field(const std::string& s) {
  return s.find(',') == std::string::npos ? s : "\"" + s + "\"";
}

}  // namespace

FiniteNet load_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty matrix CSV");
  auto labels = split_csv(line);
  const std::size_t n = labels.size();
  std::vector<Rational> matrix;
  matrix.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw ValidationError("matrix CSV has too few rows");
    auto cells = split_csv(line);
    if (cells.size() != n) throw ValidationError("matrix CSV row " + std::to_string(i + 1) +
                                                 " has " + std::to_string(cells.size()) + " cells");
    for (auto& c : cells) matrix.push_back(parse_rational(c));
  }
  return FiniteNet::explicit_matrix(std::move(labels), std::move(matrix));
}

void save_matrix_csv(const IndexedMetric& m, std::ostream& out) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) out << (i ? "," : "") << csv_field(m.label(i));
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out << (j ? "," : "") << to_string(m.distance(i, j));
    out << '\n';
  }
}

}  // namespace warpcone

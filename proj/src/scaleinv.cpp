#include "warpcone/scaleinv.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <memory>
#include <numeric>
#include <ostream>

#include <omp.h>

#include "warpcone/errors.hpp"

namespace warpcone {

namespace {

// Fixed-point copy of a metric that has no native fixed view.
class LocalFixed final : public FixedView {
 public:
  explicit LocalFixed(const IndexedMetric& m) : n_(m.size()) {
    std::vector<Rational> d(n_ * n_);
    BigInt den = 1;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        d[i * n_ + j] = m.distance(i, j);
        den = lcm(den, warpcone::denom(d[i * n_ + j]));
      }
    const BigInt cap = BigInt(1) << 120;
    num_.resize(n_ * n_);
    for (std::size_t k = 0; k < d.size(); ++k) {
      BigInt v = warpcone::numer(d[k]) * (den / warpcone::denom(d[k]));
      if (v >= cap) throw CapacityError("distances exceed the fixed-point range", 120);
      num_[k] = to_int128(v);
    }
    den_ = den;
  }
  const BigInt& den() const override { return den_; }
  int128 num(std::size_t i, std::size_t j) const override { return num_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<int128> num_;
  BigInt den_;
};

struct View {
  std::unique_ptr<LocalFixed> hold;
  const FixedView* f = nullptr;

  explicit View(const IndexedMetric& m) : f(m.fixed()) {
    if (!f) {
      hold = std::make_unique<LocalFixed>(m);
      f = hold.get();
    }
  }
  int128 num(std::size_t i, std::size_t j) const { return f->num(i, j); }
  Rational value(int128 v) const { return Rational(from_int128(v)) / Rational(f->den()); }
};

// d < x (strict) or d <= x as num < bar.v
struct Bar {
  int128 v = 0;
  bool all = false;
  bool below(int128 num) const { return all || num < v; }
};

Bar bar(const View& w, const Rational& x, bool strict) {
  const Rational s = x * Rational(w.f->den());
  BigInt T = strict ? ceil(s) : floor(s) + 1;
  Bar b;
  if (T > (BigInt(1) << 126))
    b.all = true;
  else
    b.v = T < 0 ? int128(0) : to_int128(T);
  return b;
}

struct UnionFind {
  std::vector<std::size_t> p;
  explicit UnionFind(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  std::size_t find(std::size_t x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) p[std::max(a, b)] = std::min(a, b);
  }
};

int128 diameter_num(const View& w, const std::vector<std::size_t>& part, Exec exec) {
  int128 best = 0;
  const auto k = static_cast<std::int64_t>(part.size());
#pragma omp parallel for schedule(dynamic, 16) reduction(max : best) if (exec == Exec::Parallel)
  for (std::int64_t a = 0; a < k; ++a)
    for (std::int64_t b = a + 1; b < k; ++b)
      best = std::max(best, w.num(part[static_cast<std::size_t>(a)], part[static_cast<std::size_t>(b)]));
  return best;
}

std::vector<std::vector<std::size_t>> components(const View& w, const std::vector<std::size_t>& sub,
                                                 const Bar& lt) {
  UnionFind uf(sub.size());
  for (std::size_t a = 0; a < sub.size(); ++a)
    for (std::size_t b = a + 1; b < sub.size(); ++b)
      if (uf.find(a) != uf.find(b) && lt.below(w.num(sub[a], sub[b]))) uf.unite(a, b);
  std::vector<std::vector<std::size_t>> parts;
  std::vector<std::size_t> slot(sub.size(), sub.size());
  std::vector<std::size_t> order(sub.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sub[a] < sub[b]; });
  for (auto a : order) {
    const std::size_t r = uf.find(a);
    if (slot[r] == sub.size()) {
      slot[r] = parts.size();
      parts.emplace_back();
    }
    parts[slot[r]].push_back(sub[a]);
  }
  return parts;
}

int128 cover_S(const View& w, const std::vector<std::size_t>& color, std::size_t colors,
               const Bar& lt, Exec exec) {
  int128 S = 0;
  for (std::size_t c = 0; c < colors; ++c) {
    std::vector<std::size_t> sub;
    for (std::size_t i = 0; i < color.size(); ++i)
      if (color[i] == c) sub.push_back(i);
    for (const auto& part : components(w, sub, lt)) S = std::max(S, diameter_num(w, part, exec));
  }
  return S;
}

// Maximum independent set of the conflict graph, branch and bound with a clique-cover bound.
struct Mis {
  std::vector<std::uint64_t> adj;
  std::uint64_t best_set = 0;
  int best = 0;

  int cover_bound(std::uint64_t cand) const {
    int k = 0;
    while (cand) {
      std::uint64_t clique = 0, pool = cand;
      while (pool) {
        const int v = std::countr_zero(pool);
        clique |= std::uint64_t(1) << v;
        pool &= adj[v];
      }
      cand &= ~clique;
      ++k;
    }
    return k;
  }
  void run(std::uint64_t cand, std::uint64_t chosen, int size) {
    if (!cand) {
      if (size > best) {
        best = size;
        best_set = chosen;
      }
      return;
    }
    if (size + cover_bound(cand) <= best) return;
    // branch on the vertex with the most conflicts inside cand
    int v = -1, deg = -1;
    for (std::uint64_t pool = cand; pool; pool &= pool - 1) {
      const int u = std::countr_zero(pool);
      const int d = std::popcount(adj[u] & cand);
      if (d > deg) {
        deg = d;
        v = u;
      }
    }
    const std::uint64_t bit = std::uint64_t(1) << v;
    run(cand & ~adj[v] & ~bit, chosen | bit, size + 1);
    if (deg > 0) run(cand & ~bit, chosen, size);
  }
};

}  // namespace

Rational ComponentDecomposition::max_diameter() const {
  Rational m = 0;
  for (const auto& d : diameter) m = std::max(m, d);
  return m;
}

ComponentDecomposition r_components(const IndexedMetric& m, const std::vector<std::size_t>& subset,
                                    const Rational& R, Exec exec) {
  if (subset.empty()) throw ValidationError("subset must be nonempty");
  if (R <= 0) throw ValidationError("R must be positive");
  for (auto i : subset)
    if (i >= m.size()) throw ValidationError("subset index out of range");
  std::vector<std::size_t> sub(subset);
  std::sort(sub.begin(), sub.end());
  if (std::adjacent_find(sub.begin(), sub.end()) != sub.end())
    throw ValidationError("subset has repeated indices");
  View w(m);
  ComponentDecomposition out;
  out.R = R;
  out.parts = components(w, sub, bar(w, R, true));
  for (const auto& p : out.parts) out.diameter.push_back(w.value(diameter_num(w, p, exec)));
  return out;
}

ComponentDecomposition r_components(const IndexedMetric& m, const Rational& R, Exec exec) {
  std::vector<std::size_t> all(m.size());
  std::iota(all.begin(), all.end(), 0);
  return r_components(m, all, R, exec);
}

std::vector<std::size_t> farthest_point_order(const IndexedMetric& m, std::optional<Rational> stop,
                                              Exec exec) {
  const std::size_t n = m.size();
  if (n == 0) return {};
  View w(m);
  Bar lt;
  if (stop) lt = bar(w, *stop, true);
  std::vector<int128> mind(n);
  std::vector<std::size_t> order{0};
  const auto N = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (std::int64_t i = 0; i < N; ++i) mind[static_cast<std::size_t>(i)] = w.num(0, static_cast<std::size_t>(i));
  mind[0] = -1;
  while (order.size() < n) {
    std::size_t next = n;
    for (std::size_t i = 0; i < n; ++i)
      if (mind[i] >= 0 && (next == n || mind[i] > mind[next])) next = i;
    if (next == n) break;
    if (stop && lt.below(mind[next])) break;
    order.push_back(next);
    mind[next] = -1;
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
    for (std::int64_t i = 0; i < N; ++i) {
      auto& v = mind[static_cast<std::size_t>(i)];
      if (v > 0) v = std::min(v, w.num(next, static_cast<std::size_t>(i)));
    }
  }
  return order;
}

bool is_separated(const IndexedMetric& m, const std::vector<std::size_t>& set, const Rational& N) {
  View w(m);
  const Bar lt = bar(w, N, true);
  for (std::size_t a = 0; a < set.size(); ++a)
    for (std::size_t b = a + 1; b < set.size(); ++b)
      if (set[a] == set[b] || lt.below(w.num(set[a], set[b]))) return false;
  return true;
}

VnResult vn_invariant(const IndexedMetric& m, const Rational& N, std::size_t exact_cap, Exec exec) {
  if (N <= 0) throw ValidationError("N must be positive");
  if (exact_cap > 64) throw ValidationError("exact search is limited to 64 points");
  VnResult out;
  out.N = N;
  out.greedy = farthest_point_order(m, N, exec);
  const std::size_t n = m.size();
  if (n > 0 && n <= exact_cap) {
    View w(m);
    const Bar lt = bar(w, N, true);
    Mis s;
    s.adj.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && lt.below(w.num(i, j))) s.adj[i] |= std::uint64_t(1) << j;
    s.best = static_cast<int>(out.greedy.size());
    for (auto g : out.greedy) s.best_set |= std::uint64_t(1) << g;
    const std::uint64_t all = n == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << n) - 1;
    s.run(all, 0, 0);
    out.exact = static_cast<std::size_t>(s.best);
    for (std::size_t i = 0; i < n; ++i)
      if (s.best_set >> i & 1) out.exact_set.push_back(i);
  }
  return out;
}

std::optional<Rational> verify_cover(const IndexedMetric& m, const CoverCertificate& c, Exec exec) {
  if (c.colors == 0 || c.color.size() != m.size() || c.R <= 0) return std::nullopt;
  for (auto k : c.color)
    if (k >= c.colors) return std::nullopt;
  View w(m);
  return w.value(cover_S(w, c.color, c.colors, bar(w, c.R, true), exec));
}

CoverSearch asdim_cover_search(const IndexedMetric& m, const Rational& R, std::size_t d,
                               std::size_t budget, std::optional<Rational> S_max,
                               std::optional<Rational> block) {
  if (R <= 0) throw ValidationError("R must be positive");
  const std::size_t n = m.size();
  if (n == 0) throw ValidationError("empty net");
  View w(m);
  const Bar lt = bar(w, R, true);
  const std::size_t colors = d + 1;
  CoverSearch out;
  out.best.R = R;
  out.best.colors = colors;
  out.best.color.assign(n, 0);

  if (colors > 1) {
    // blocks: nearest farthest-point center
    const Rational sep = block ? *block : R * Rational(3, 4);
    const auto centers = farthest_point_order(m, sep);
    std::vector<std::vector<std::size_t>> blocks(centers.size());
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t bi = 0;
      for (std::size_t c = 1; c < centers.size(); ++c)
        if (w.num(centers[c], i) < w.num(centers[bi], i)) bi = c;
      blocks[bi].push_back(i);
    }
    // components per color as (members, diameter)
    struct Comp {
      std::vector<std::size_t> pts;
      int128 diam;
    };
    std::vector<std::vector<Comp>> comps(colors);
    auto touches = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
      for (auto x : a)
        for (auto y : b)
          if (lt.below(w.num(x, y))) return true;
      return false;
    };
    auto cross = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
      int128 best = 0;
      for (auto x : a)
        for (auto y : b) best = std::max(best, w.num(x, y));
      return best;
    };
    for (const auto& blk : blocks) {
      std::size_t pick = 0;
      int128 pick_diam = -1;
      for (std::size_t c = 0; c < colors; ++c) {
        std::vector<std::size_t> pts(blk);
        int128 diam = diameter_num(w, blk, Exec::Serial);
        for (const auto& comp : comps[c])
          if (touches(comp.pts, blk)) {
            diam = std::max({diam, comp.diam, cross(comp.pts, pts)});
            pts.insert(pts.end(), comp.pts.begin(), comp.pts.end());
          }
        if (pick_diam < 0 || diam < pick_diam) {
          pick_diam = diam;
          pick = c;
        }
      }
      Comp merged{blk, diameter_num(w, blk, Exec::Serial)};
      std::vector<Comp> keep;
      for (auto& comp : comps[pick]) {
        if (touches(comp.pts, merged.pts)) {
          merged.diam = std::max({merged.diam, comp.diam, cross(comp.pts, merged.pts)});
          merged.pts.insert(merged.pts.end(), comp.pts.begin(), comp.pts.end());
        } else {
          keep.push_back(std::move(comp));
        }
      }
      keep.push_back(std::move(merged));
      comps[pick] = std::move(keep);
      for (auto i : blk) out.best.color[i] = pick;
    }
  }

  int128 S = cover_S(w, out.best.color, colors, lt, Exec::Serial);
  const Bar within = S_max ? bar(w, *S_max, false) : Bar{0, true};
  // single-point recolorings inside a worst component
  while (colors > 1 && out.swaps < budget && !within.below(S)) {
    bool improved = false;
    for (std::size_t c = 0; c < colors && !improved; ++c) {
      std::vector<std::size_t> sub;
      for (std::size_t i = 0; i < n; ++i)
        if (out.best.color[i] == c) sub.push_back(i);
      for (const auto& part : components(w, sub, lt)) {
        if (diameter_num(w, part, Exec::Serial) != S) continue;
        for (auto p : part) {
          for (std::size_t c2 = 0; c2 < colors && !improved; ++c2) {
            if (c2 == c) continue;
            out.best.color[p] = c2;
            const int128 S2 = cover_S(w, out.best.color, colors, lt, Exec::Serial);
            if (S2 < S) {
              S = S2;
              improved = true;
            } else {
              out.best.color[p] = c;
            }
          }
          if (improved) break;
        }
        if (improved) break;
      }
    }
    if (!improved) break;
    ++out.swaps;
  }
  out.best.S = w.value(S);
  out.found = within.below(S);
  return out;
}

PropAProbe prop_a_ball_average(const IndexedMetric& m, const Rational& R, const Rational& S,
                               Exec exec) {
  if (R < 0 || S < R) throw ValidationError("need 0 <= R <= S");
  const std::size_t n = m.size();
  PropAProbe out;
  if (n == 0) return out;
  View w(m);
  const Bar inS = bar(w, S, false), inR = bar(w, R, false);
  const std::size_t words = (n + 63) / 64;
  std::vector<std::uint64_t> ball(n * words, 0);
  std::vector<std::size_t> size(n, 0);
  const auto N = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (std::int64_t ii = 0; ii < N; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t j = 0; j < n; ++j)
      if (inS.below(w.num(i, j))) {
        ball[i * words + j / 64] |= std::uint64_t(1) << (j % 64);
        ++size[i];
      }
  }
  struct Best {
    Rational v = -1;
    std::size_t a = 0, b = 0, pairs = 0;
  };
  std::vector<Best> local;
#pragma omp parallel if (exec == Exec::Parallel)
  {
#pragma omp single
    local.resize(static_cast<std::size_t>(omp_get_num_threads()));
    Best& me = local[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t ii = 0; ii < N; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!inR.below(w.num(i, j))) continue;
        ++me.pairs;
        std::size_t inter = 0;
        for (std::size_t k = 0; k < words; ++k)
          inter += static_cast<std::size_t>(std::popcount(ball[i * words + k] & ball[j * words + k]));
        const long a = static_cast<long>(size[i]), b = static_cast<long>(size[j]);
        const long c = static_cast<long>(inter);
        Rational v = Rational(c) * abs(Rational(1, a) - Rational(1, b)) + Rational(a - c, a) +
                     Rational(b - c, b);
        if (v > me.v) {
          me.v = v;
          me.a = i;
          me.b = j;
        }
      }
    }
  }
  out.value = 0;
  bool have = false;
  for (const auto& l : local) {
    out.pairs += l.pairs;
    if (l.v < 0) continue;
    if (!have || l.v > out.value || (l.v == out.value && std::pair(l.a, l.b) < std::pair(out.a, out.b))) {
      have = true;
      out.value = l.v;
      out.a = l.a;
      out.b = l.b;
    }
  }
  return out;
}

nlohmann::json to_json(const ComponentDecomposition& c) {
  nlohmann::json j;
  j["R"] = to_string(c.R);
  j["parts"] = c.parts;
  j["diameters"] = nlohmann::json::array();
  for (const auto& d : c.diameter) j["diameters"].push_back(to_string(d));
  return j;
}

nlohmann::json to_json(const CoverCertificate& c) {
  return {{"R", to_string(c.R)}, {"colors", c.colors}, {"color", c.color}, {"S", to_string(c.S)}};
}

nlohmann::json to_json(const VnResult& v) {
  nlohmann::json j;
  j["N"] = to_string(v.N);
  j["greedy"] = v.greedy.size();
  j["greedy_set"] = v.greedy;
  j["exact"] = v.exact ? nlohmann::json(*v.exact) : nlohmann::json(nullptr);
  return j;
}

CoverCertificate cover_from_json(const nlohmann::json& j) {
  try {
    CoverCertificate c;
    c.R = parse_rational(j.at("R").get<std::string>());
    c.colors = j.at("colors").get<std::size_t>();
    c.color = j.at("color").get<std::vector<std::size_t>>();
    c.S = parse_rational(j.at("S").get<std::string>());
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad cover certificate: ") + e.what());
  }
}

void write_sweep_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows, std::ostream& out) {
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << r[k];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw ValidationError("row width differs from the header");
    line(r);
  }
}

}  // namespace warpcone

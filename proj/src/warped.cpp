#include "warpcone/warped.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <set>

#include "warpcone/errors.hpp"

namespace warpcone {

namespace {

constexpr int128 kInf = std::numeric_limits<int128>::max() / 4;
const BigInt kBudget = BigInt(1) << 120;

std::int64_t circ(std::int64_t a, std::int64_t b, std::int64_t D) {
  std::int64_t d = a - b;
  if (d < 0) d = -d;
  return std::min(d, D - d);
}

std::uint64_t ceil_u64(const Rational& x) {
  BigInt c = ceil(x);
  if (c < 0) return 0;
  if (!fits_int64(c)) throw CapacityError("radius out of range", std::numeric_limits<std::size_t>::max());
  return static_cast<std::uint64_t>(to_int64(c));
}

}  // namespace

std::string to_string(WarpMethod m) {
  switch (m) {
    case WarpMethod::ClosedForm: return "closed_form";
    case WarpMethod::Infimum: return "infimum";
    case WarpMethod::Graph: return "graph";
    case WarpMethod::OrbitNet: return "orbit_net";
  }
  return "?";
}

struct WarpedLevel::Impl final : FixedView {
  enum class Kernel { Affine, Permutation, Table, Orbit };

  WarpMethod method = WarpMethod::ClosedForm;
  Kernel kernel = Kernel::Table;
  Rational t;
  FiniteNet domain;
  BigInt Dw = 1;
  int128 unit = 1;
  int128 P = 1;
  const FixedView* base = nullptr;

  std::vector<Word> words;
  std::vector<std::uint32_t> len;
  std::vector<std::uint32_t> parent, gen;
  DomainAction da;

  std::size_t k = 0;
  std::vector<std::int64_t> D;
  std::vector<int128> w;
  TorusNorm norm = TorusNorm::L1;
  std::vector<std::int64_t> res;
  std::vector<std::int8_t> sigma;
  std::vector<std::int64_t> off;

  std::size_t jumps = 0;
  std::vector<Word> orbit;
  std::vector<std::size_t> orbit_seed;

  // orbit nets: point i = seed[i] + coord[i] . beta, distances from per-seed-pair tables
  std::size_t om = 0, nseeds = 0;
  std::int64_t oR = 0, oW = 0, oWm = 1;
  std::vector<std::int64_t> ocoord;
  std::vector<int128> otab;

  int128 orbit_num(std::size_t i, std::size_t j) const {
    std::int64_t idx = 0;
    for (std::size_t c = 0; c < om; ++c) idx = idx * oW + (ocoord[j * om + c] - ocoord[i * om + c] + 2 * oR);
    return otab[(orbit_seed[i] * nseeds + orbit_seed[j]) * static_cast<std::size_t>(oWm) +
                static_cast<std::size_t>(idx)];
  }

  mutable std::unique_ptr<std::once_flag[]> once;
  mutable std::vector<std::vector<int128>> rows;
  mutable std::atomic<bool> all_ready{false};

  Impl(Rational t_, FiniteNet dom) : t(std::move(t_)), domain(std::move(dom)) {
    once = std::make_unique<std::once_flag[]>(domain.size());
    rows.resize(domain.size());
  }

  const BigInt& den() const override { return Dw; }

  int128 affine_base(const std::int64_t* a, const std::int64_t* b) const {
    int128 acc = 0;
    for (std::size_t c = 0; c < k; ++c) {
      int128 v = w[c] * circ(a[c], b[c], D[c]);
      if (norm == TorusNorm::L1)
        acc += v;
      else
        acc = std::max(acc, v);
    }
    return acc;
  }

  int128 base_num(std::size_t i, std::size_t j) const {
    if (kernel == Kernel::Affine) return P * affine_base(&res[i * k], &res[j * k]);
    return P * base->num(i, j);
  }

  void image_affine(std::size_t g, const std::int64_t* x, std::int64_t* out) const {
    const std::int64_t* o = &off[g * k];
    for (std::size_t c = 0; c < k; ++c) {
      std::int64_t v = sigma[g] > 0 ? x[c] + o[c] : o[c] - x[c];
      v %= D[c];
      if (v < 0) v += D[c];
      out[c] = v;
    }
  }

  int128 pair(std::size_t i, std::size_t j, int128 cap) const {
    int128 best = std::min(base_num(i, j), cap);
    if (kernel == Kernel::Affine) {
      std::vector<std::int64_t> img(k);
      for (std::size_t g = 1; g < words.size(); ++g) {
        const int128 l = static_cast<int128>(len[g]) * unit;
        if (l >= best) break;
        image_affine(g, &res[i * k], img.data());
        best = std::min(best, l + P * affine_base(img.data(), &res[j * k]));
      }
      return best;
    }
    std::vector<std::uint32_t> img(words.size());
    img[0] = static_cast<std::uint32_t>(i);
    for (std::size_t g = 1; g < words.size(); ++g) {
      const int128 l = static_cast<int128>(len[g]) * unit;
      if (l >= best) break;
      img[g] = da.images[gen[g]][img[parent[g]]];
      best = std::min(best, l + P * base->num(img[g], j));
    }
    return best;
  }

  void closed_form_row(std::size_t i, std::vector<int128>& out) const {
    const std::size_t n = domain.size();
    out.resize(n);
    int128 maxv = 0;
    for (std::size_t j = 0; j < n; ++j) {
      out[j] = base_num(i, j);
      maxv = std::max(maxv, out[j]);
    }
    std::vector<std::int64_t> img(k);
    std::vector<std::uint32_t> pimg(kernel == Kernel::Permutation ? words.size() : 0);
    if (!pimg.empty()) pimg[0] = static_cast<std::uint32_t>(i);
    for (std::size_t g = 1; g < words.size(); ++g) {
      const int128 l = static_cast<int128>(len[g]) * unit;
      if (l >= maxv) break;
      if (kernel == Kernel::Affine) {
        image_affine(g, &res[i * k], img.data());
        for (std::size_t j = 0; j < n; ++j) {
          int128 c = l + P * affine_base(img.data(), &res[j * k]);
          if (c < out[j]) out[j] = c;
        }
      } else {
        pimg[g] = da.images[gen[g]][pimg[parent[g]]];
        const std::uint32_t z = pimg[g];
        for (std::size_t j = 0; j < n; ++j) {
          int128 c = l + P * base->num(z, j);
          if (c < out[j]) out[j] = c;
        }
      }
      if (g + 1 < words.size() && len[g + 1] != len[g]) {
        maxv = 0;
        for (auto v : out) maxv = std::max(maxv, v);
      }
    }
  }

  void graph_row(std::size_t s, std::vector<int128>& dist, std::size_t& max_jumps) const {
    const std::size_t n = domain.size();
    dist.assign(n, kInf);
    std::vector<std::uint32_t> jumps(n, 0);
    std::vector<char> done(n, 0);
    dist[s] = 0;
    for (std::size_t it = 0; it < n; ++it) {
      std::size_t u = n;
      for (std::size_t v = 0; v < n; ++v) {
        if (done[v]) continue;
        if (u == n || dist[v] < dist[u] || (dist[v] == dist[u] && jumps[v] < jumps[u])) u = v;
      }
      if (u == n || dist[u] >= kInf) break;
      done[u] = 1;
      max_jumps = std::max<std::size_t>(max_jumps, jumps[u]);
      for (std::size_t v = 0; v < n; ++v) {
        if (done[v]) continue;
        int128 c = dist[u] + P * base->num(u, v);
        if (c < dist[v] || (c == dist[v] && jumps[u] < jumps[v])) {
          dist[v] = c;
          jumps[v] = jumps[u];
        }
      }
      for (const auto& g : da.images) {
        const std::uint32_t v = g[u];
        if (done[v]) continue;
        int128 c = dist[u] + unit;
        if (c < dist[v] || (c == dist[v] && jumps[u] + 1 < jumps[v])) {
          dist[v] = c;
          jumps[v] = jumps[u] + 1;
        }
      }
    }
  }

  void compute_row(std::size_t i, std::vector<int128>& out) const {
    if (kernel == Kernel::Orbit) {
      out.resize(domain.size());
      for (std::size_t j = 0; j < out.size(); ++j) out[j] = orbit_num(i, j);
      return;
    }
    if (method == WarpMethod::Graph) {
      std::size_t mj = 0;
      graph_row(i, out, mj);
      return;
    }
    closed_form_row(i, out);
  }

  int128 num(std::size_t i, std::size_t j) const override {
    if (kernel == Kernel::Orbit) return orbit_num(i, j);
    if (all_ready.load(std::memory_order_acquire)) return rows[i][j];
    if (method == WarpMethod::Graph || kernel == Kernel::Table) {
      std::call_once(once[i], [this, i] { compute_row(i, rows[i]); });
      return rows[i][j];
    }
    return pair(i, j, kInf);
  }
};

// ---------------------------------------------------------------- accessors

std::size_t WarpedLevel::size() const { return impl_->domain.size(); }
Rational WarpedLevel::distance(std::size_t i, std::size_t j) const {
  return Rational(from_int128(num(i, j)), impl_->Dw);
}
const FixedView* WarpedLevel::fixed() const { return impl_.get(); }
std::string WarpedLevel::label(std::size_t i) const { return impl_->domain.label(i); }
const Rational& WarpedLevel::t() const { return impl_->t; }
const FiniteNet& WarpedLevel::domain() const { return impl_->domain; }
WarpMethod WarpedLevel::method() const { return impl_->method; }
const BigInt& WarpedLevel::den() const { return impl_->Dw; }
int128 WarpedLevel::base_num(std::size_t i, std::size_t j) const { return impl_->base_num(i, j); }
int128 WarpedLevel::num(std::size_t i, std::size_t j) const { return impl_->num(i, j); }
std::size_t WarpedLevel::max_jumps() const { return impl_->jumps; }
const std::vector<Word>& WarpedLevel::orbit_words() const { return impl_->orbit; }
const std::vector<std::size_t>& WarpedLevel::orbit_seeds() const { return impl_->orbit_seed; }

int128 WarpedLevel::num_below(std::size_t i, std::size_t j, int128 cap) const {
  const Impl& m = *impl_;
  if (m.all_ready.load(std::memory_order_acquire) || m.method == WarpMethod::Graph ||
      m.kernel == Impl::Kernel::Table || m.kernel == Impl::Kernel::Orbit)
    return m.num(i, j);
  return m.pair(i, j, cap);
}

const std::vector<int128>& WarpedLevel::row(std::size_t i) const {
  const Impl& m = *impl_;
  if (i >= m.domain.size()) throw ValidationError("row index out of range");
  std::call_once(m.once[i], [&m, i] { m.compute_row(i, m.rows[i]); });
  return m.rows[i];
}

void WarpedLevel::materialize(Exec exec) const {
  const Impl& m = *impl_;
  if (m.all_ready.load(std::memory_order_acquire)) return;
  const auto n = static_cast<std::int64_t>(m.domain.size());
#pragma omp parallel for schedule(dynamic, 4) if (exec == Exec::Parallel)
  for (std::int64_t i = 0; i < n; ++i) row(static_cast<std::size_t>(i));
  m.all_ready.store(true, std::memory_order_release);
}

std::vector<Rational> WarpedLevel::table(Exec exec) const {
  materialize(exec);
  const std::size_t n = size();
  std::vector<Rational> out;
  out.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.emplace_back(from_int128(impl_->rows[i][j]), impl_->Dw);
  return out;
}

// ---------------------------------------------------------------- construction

namespace {

using Impl = WarpedLevel::Impl;

void set_scale(Impl& m, const BigInt& base_den, const BigInt& max_base) {
  Rational f = m.t / Rational(base_den);
  BigInt P = numer(f);
  m.Dw = denom(f);
  if (P * max_base > kBudget || m.Dw * BigInt(1u << 20) > kBudget)
    throw CapacityError("warped distances exceed the fixed-point range", 120);
  m.P = to_int128(P);
  m.unit = to_int128(m.Dw);
}

void load_ball(Impl& m, const ActionSystem& sys, std::size_t cap) {
  const std::uint64_t R = ceil_u64(m.t * m.domain.diameter());
  m.words = ball_by_length(sys.group(), R, cap);
  m.len.clear();
  for (const auto& g : m.words) m.len.push_back(static_cast<std::uint32_t>(word_length(g, sys.group())));
}

void load_parents(Impl& m, const ActionSystem& sys) {
  const GroupSpec& G = sys.group();
  std::map<Word, std::uint32_t> index;
  for (std::size_t i = 0; i < m.words.size(); ++i) index.emplace(m.words[i], static_cast<std::uint32_t>(i));
  m.parent.assign(m.words.size(), 0);
  m.gen.assign(m.words.size(), 0);
  const auto& gens = G.generators();
  for (std::size_t i = 1; i < m.words.size(); ++i) {
    bool found = false;
    for (std::size_t s = 0; s < gens.size() && !found; ++s) {
      Word rest = multiply(inverse(gens[s].element, G), m.words[i], G);
      auto it = index.find(rest);
      if (it != index.end() && m.len[it->second] + 1 == m.len[i]) {
        m.parent[i] = it->second;
        m.gen[i] = static_cast<std::uint32_t>(s);
        found = true;
      }
    }
    if (!found) throw Error("ball enumeration lost a geodesic parent");
  }
}

bool affine_capable(const ActionSystem& sys, const FiniteNet& domain) {
  if (domain.kind() != NetKind::CircleQ && domain.kind() != NetKind::TorusProduct) return false;
  for (const auto& mp : sys.basic_maps())
    if (mp.type() != MapType::Rotation && mp.type() != MapType::Reflection) return false;
  return true;
}

// Returns false when residues do not fit 62 bits.
bool load_affine(Impl& m, const ActionSystem& sys) {
  const FiniteNet& dom = m.domain;
  const std::size_t k = dom.dimension();
  m.k = k;
  m.norm = dom.norm();
  std::vector<BigInt> D(k, BigInt(1));
  for (const auto& p : dom.points())
    for (std::size_t c = 0; c < k; ++c) D[c] = lcm(D[c], denom(p[c]));
  for (const auto& mp : sys.basic_maps())
    for (std::size_t c = 0; c < k; ++c) D[c] = lcm(D[c], denom(mp.values()[c]));
  for (auto& d : D)
    if (d > (BigInt(1) << 61)) return false;
  BigInt den = 1;
  for (std::size_t c = 0; c < k; ++c) den = lcm(den, denom(dom.scales()[c] / Rational(D[c])));
  BigInt max_base = 0;
  m.w.clear();
  m.D.clear();
  for (std::size_t c = 0; c < k; ++c) {
    BigInt wc = numer(dom.scales()[c] / Rational(D[c]) * Rational(den));
    max_base += wc * D[c];
    if (max_base > kBudget) return false;
    m.w.push_back(to_int128(wc));
    m.D.push_back(to_int64(D[c]));
  }
  set_scale(m, den, max_base);
  m.res.clear();
  m.res.reserve(dom.size() * k);
  for (const auto& p : dom.points())
    for (std::size_t c = 0; c < k; ++c) m.res.push_back(to_int64(numer(p[c] * Rational(D[c]))));
  // each ball element acts as z -> sigma z + b
  Point zero(k, Rational(0)), quarter(k, Rational(1, 4));
  m.sigma.clear();
  m.off.clear();
  for (const auto& g : m.words) {
    Point b = sys.apply(g, zero);
    Point q = sys.apply(g, quarter);
    const bool pos = mod1(q[0] - b[0]) == Rational(1, 4);
    m.sigma.push_back(pos ? 1 : -1);
    for (std::size_t c = 0; c < k; ++c) m.off.push_back(to_int64(numer(b[c] * Rational(D[c]))));
  }
  m.kernel = Impl::Kernel::Affine;
  return true;
}

void load_permutation(Impl& m, const ActionSystem& sys) {
  m.da = restrict_to(sys, m.domain);
  if (!m.da.closed())
    throw ClosureError("domain is not invariant under the generators",
                       ceil_u64(m.t * m.domain.diameter()));
  m.base = m.domain.fixed();
  if (!m.base) throw CapacityError("domain distances exceed the fixed-point range", 100);
  BigInt max_base = numer(m.domain.diameter() * Rational(m.base->den()));
  set_scale(m, m.base->den(), max_base);
  load_parents(m, sys);
  m.kernel = Impl::Kernel::Permutation;
}

void require_t(const Rational& t) {
  if (t <= 0) throw ValidationError("scale t must be positive");
}

}  // namespace

WarpedLevel warped_closed_form_level(const ActionSystem& sys, const Rational& t,
                                     const FiniteNet& domain, std::size_t cap) {
  require_t(t);
  if (sys.isometric() != true)
    throw ValidationError("closed form needs a system verified isometric");
  auto m = std::make_shared<Impl>(t, domain);
  m->method = WarpMethod::ClosedForm;
  load_ball(*m, sys, cap);
  if (!(affine_capable(sys, domain) && load_affine(*m, sys))) load_permutation(*m, sys);
  return WarpedLevel(m);
}

WarpedLevel infimum_level(const ActionSystem& sys, const Rational& t, const FiniteNet& domain,
                          std::size_t cap) {
  require_t(t);
  auto m = std::make_shared<Impl>(t, domain);
  m->method = WarpMethod::Infimum;
  load_ball(*m, sys, cap);
  load_permutation(*m, sys);
  return WarpedLevel(m);
}

WarpedLevel warped_distance_graph(const ActionSystem& sys, const Rational& t,
                                  const FiniteNet& domain, std::optional<std::uint64_t> R_path,
                                  Exec exec) {
  require_t(t);
  auto m = std::make_shared<Impl>(t, domain);
  m->method = WarpMethod::Graph;
  m->da = restrict_to(sys, domain);
  if (!m->da.closed())
    throw ClosureError("graph method needs a generator-invariant domain",
                       ceil_u64(t * domain.diameter()));
  m->base = domain.fixed();
  if (!m->base) throw CapacityError("domain distances exceed the fixed-point range", 100);
  set_scale(*m, m->base->den(), numer(domain.diameter() * Rational(m->base->den())) *
                                    BigInt(domain.size() + 1));
  const auto n = static_cast<std::int64_t>(domain.size());
  std::vector<std::size_t> jumps(domain.size(), 0);
  const Impl& im = *m;
#pragma omp parallel for schedule(dynamic, 4) if (exec == Exec::Parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto s = static_cast<std::size_t>(i);
    std::call_once(im.once[s], [&im, &jumps, s] { im.graph_row(s, im.rows[s], jumps[s]); });
  }
  m->jumps = domain.size() ? *std::max_element(jumps.begin(), jumps.end()) : 0;
  m->all_ready.store(true);
  const std::uint64_t limit = R_path ? *R_path : ceil_u64(t * domain.diameter());
  if (m->jumps > limit)
    throw ClosureError("a shortest path uses " + std::to_string(m->jumps) +
                           " generator jumps, more than R_path = " + std::to_string(limit),
                       m->jumps);
  return WarpedLevel(m);
}

WarpedLevel orbit_net_level(const ActionSystem& sys, const Rational& t,
                            const std::vector<Point>& seeds, std::uint64_t R, std::size_t cap) {
  require_t(t);
  const GroupSpec& G = sys.group();
  if (G.kind() != GroupKind::FreeAbelian) throw UnsupportedError("orbit nets need a free abelian group");
  for (const auto& mp : sys.basic_maps())
    if (mp.type() != MapType::Rotation) throw UnsupportedError("orbit nets need rotation generators");
  if (sys.space().kind() != NetKind::CircleQ) throw UnsupportedError("orbit nets live on the circle");
  if (seeds.empty()) throw ValidationError("orbit net needs a seed");
  if (R > 10'000) throw CapacityError("orbit radius too large", 10'000);
  const Rational s = sys.space().scales()[0];
  const std::size_t m = G.orders().size();
  std::vector<Rational> beta;
  for (const auto& mp : sys.basic_maps()) beta.push_back(mp.values()[0]);

  const std::vector<Word> words = ball(G, R, cap);
  const auto iR = static_cast<std::int64_t>(R);
  auto coords_of = [&](const Word& w) {
    std::vector<std::int64_t> c(m);
    for (std::size_t a = 0; a < m; ++a) c[a] = w.nf[a];
    return c;
  };
  std::vector<Point> pts;
  std::vector<std::int64_t> ocoord;
  std::vector<std::size_t> oseed;
  std::vector<Word> owords;
  for (std::size_t k = 0; k < seeds.size(); ++k)
    for (const auto& g : words) {
      pts.push_back(sys.apply(g, seeds[k]));
      auto c = coords_of(g);
      ocoord.insert(ocoord.end(), c.begin(), c.end());
      oseed.push_back(k);
      owords.push_back(g);
    }
  {
    std::set<Point> uniq(pts.begin(), pts.end());
    if (uniq.size() != pts.size())
      throw DegenerateActionError("orbit points coincide; action is not free on this ball");
  }
  auto l1 = [](const std::vector<std::int64_t>& v) {
    std::int64_t a = 0;
    for (auto x : v) a += x < 0 ? -x : x;
    return a;
  };
  auto tnorm = [&](const Rational& delta, const std::vector<std::int64_t>& c) {
    Rational z = delta;
    for (std::size_t a = 0; a < m; ++a) z += Rational(c[a]) * beta[a];
    return t * s * circle_dist(z, 0);
  };
  const std::int64_t W = 4 * iR + 1;
  std::int64_t Wm = 1;
  for (std::size_t a = 0; a < m; ++a) {
    if (Wm > 50'000'000 / W) throw CapacityError("orbit difference table too large", 50'000'000);
    Wm *= W;
  }
  const std::size_t K = seeds.size();
  // candidates per seed pair: optimal c has t|delta + c beta| <= 2R + t|delta| and |c| <= 4R + t|delta|
  std::vector<std::vector<std::pair<std::vector<std::int64_t>, Rational>>> cands(K * K);
  BigInt Dw = 1;
  for (std::size_t a = 0; a < K; ++a)
    for (std::size_t b = 0; b < K; ++b) {
      const Rational delta = seeds[a][0] - seeds[b][0];
      const Rational td = t * s * circle_dist(delta, 0);
      const Rational lim = Rational(static_cast<long>(2 * R)) + td;
      const std::uint64_t rad = 4 * R + ceil_u64(td);
      for (const auto& c : ball(G, rad, cap)) {
        auto cv = coords_of(c);
        Rational v = tnorm(delta, cv);
        if (v <= lim) {
          Dw = lcm(Dw, denom(v));
          cands[a * K + b].emplace_back(std::move(cv), std::move(v));
        }
      }
    }
  FiniteNet domain = sys.space().with_points(pts);
  const FixedView* bf = domain.fixed();
  if (!bf) throw CapacityError("orbit net base distances exceed the fixed-point range", 100);
  Dw = lcm(Dw, denom(t / Rational(bf->den())));
  if (Dw > kBudget) throw CapacityError("warped distances exceed the fixed-point range", 120);

  auto m_ = std::make_shared<Impl>(t, domain);
  Impl& im = *m_;
  im.method = WarpMethod::OrbitNet;
  im.kernel = Impl::Kernel::Orbit;
  im.Dw = Dw;
  im.unit = to_int128(Dw);
  im.base = bf;
  const BigInt P = numer(t / Rational(bf->den()) * Rational(Dw));
  if (P * numer(domain.diameter() * Rational(bf->den())) > kBudget)
    throw CapacityError("orbit net base distances exceed the fixed-point range", 120);
  im.P = to_int128(P);
  im.orbit = std::move(owords);
  im.orbit_seed = std::move(oseed);
  im.ocoord = std::move(ocoord);
  im.om = m;
  im.nseeds = K;
  im.oR = iR;
  im.oW = W;
  im.oWm = Wm;
  im.otab.assign(K * K * static_cast<std::size_t>(Wm), kInf);
  std::vector<std::int64_t> e(m), ce(m);
  for (std::size_t ab = 0; ab < K * K; ++ab) {
    std::vector<std::pair<std::vector<std::int64_t>, int128>> cs;
    for (auto& [c, v] : cands[ab]) cs.emplace_back(c, to_int128(numer(v * Rational(Dw))));
    for (std::int64_t idx = 0; idx < Wm; ++idx) {
      std::int64_t r = idx;
      for (std::size_t a = m; a-- > 0;) {
        e[a] = r % W - 2 * iR;
        r /= W;
      }
      int128 best = kInf;
      for (auto& [c, v] : cs) {
        for (std::size_t a = 0; a < m; ++a) ce[a] = c[a] + e[a];
        best = std::min(best, static_cast<int128>(l1(ce)) * im.unit + v);
      }
      im.otab[ab * static_cast<std::size_t>(Wm) + static_cast<std::size_t>(idx)] = best;
    }
  }
  return WarpedLevel(m_);
}

// ---------------------------------------------------------------- references

namespace {

Rational closed_form_impl(const ActionSystem& sys, const Rational& t, const Point& x,
                          const Point& y, const FiniteNet* domain, std::size_t cap) {
  const FiniteNet& sp = sys.space();
  Rational best = t * sp.distance_between(x, y);
  const std::uint64_t R = ceil_u64(best);
  for (const auto& g : ball_by_length(sys.group(), R, cap)) {
    const Rational l(static_cast<long>(word_length(g, sys.group())));
    if (l >= best) break;
    Point z = sys.apply(g, x);
    if (domain && !domain->index_of(z))
      throw ClosureError("orbit closure too small for the closed form; need radius " +
                             std::to_string(R),
                         R);
    Rational c = l + t * sp.distance_between(z, y);
    if (c < best) best = c;
  }
  return best;
}

}  // namespace

Rational warped_distance_closed_form(const ActionSystem& sys, const Rational& t, const Point& x,
                                     const Point& y, const FiniteNet* domain, std::size_t cap) {
  require_t(t);
  if (sys.isometric() != true)
    throw ValidationError("closed form needs a system verified isometric");
  return closed_form_impl(sys, t, x, y, domain, cap);
}

Rational d_gamma_infimum(const ActionSystem& sys, const Rational& t, const Point& x,
                         const Point& y, std::size_t cap) {
  require_t(t);
  return closed_form_impl(sys, t, x, y, nullptr, cap);
}

std::vector<Rational> graph_reference(const ActionSystem& sys, const Rational& t,
                                      const FiniteNet& domain) {
  require_t(t);
  const std::size_t n = domain.size();
  DomainAction da = restrict_to(sys, domain);
  if (!da.closed()) throw ClosureError("graph method needs a generator-invariant domain");
  std::vector<Rational> td(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) td[i * n + j] = t * domain.distance(i, j);
  std::vector<Rational> out(n * n);
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<Rational> dist(td.begin() + static_cast<std::ptrdiff_t>(s * n),
                               td.begin() + static_cast<std::ptrdiff_t>((s + 1) * n));
    std::vector<char> done(n, 0);
    for (std::size_t it = 0; it < n; ++it) {
      std::size_t u = n;
      for (std::size_t v = 0; v < n; ++v)
        if (!done[v] && (u == n || dist[v] < dist[u])) u = v;
      done[u] = 1;
      for (std::size_t v = 0; v < n; ++v) {
        if (done[v]) continue;
        Rational c = dist[u] + td[u * n + v];
        if (c < dist[v]) dist[v] = c;
      }
      for (const auto& g : da.images) {
        const std::uint32_t v = g[u];
        if (!done[v] && dist[u] + 1 < dist[v]) dist[v] = dist[u] + 1;
      }
    }
    std::copy(dist.begin(), dist.end(), out.begin() + static_cast<std::ptrdiff_t>(s * n));
  }
  return out;
}

std::optional<std::uint64_t> stabilized_distance(const ActionSystem& sys, const Point& x,
                                                 const Point& y, std::size_t cap) {
  if (x == y) return 0;
  std::set<Point> seen{x};
  std::vector<Point> frontier{x};
  const std::size_t G = sys.group().generators().size();
  for (std::uint64_t step = 1; !frontier.empty(); ++step) {
    std::vector<Point> next;
    for (const auto& p : frontier)
      for (std::size_t g = 0; g < G; ++g) {
        Point q = sys.apply_generator(g, p);
        if (q == y) return step;
        if (seen.insert(q).second) {
          if (seen.size() > cap) return std::nullopt;
          next.push_back(std::move(q));
        }
      }
    frontier = std::move(next);
  }
  return std::nullopt;
}

bool power_bound_holds(const Rational& ratio, const Rational& L, const Rational& e) {
  if (e < 0 || L <= 0) throw ValidationError("power bound needs L > 0 and e >= 0");
  if (L >= 1 && ratio <= 1) return true;
  const BigInt fl = floor(e);
  if (!fits_int64(fl) || to_int64(fl) > 100'000) throw UndecidableError("exponent too large");
  Rational lo = 1;
  for (std::int64_t i = 0; i < to_int64(fl); ++i) lo *= L;
  if (L >= 1 && ratio <= lo) return true;
  if (L >= 1 && ratio > lo * L) return false;
  // ratio^b <= L^a with e = a/b
  const BigInt a = numer(e), b = denom(e);
  if (b > 4096 || a > 1'000'000) throw UndecidableError("exponent denominator too large to decide");
  const auto bb = static_cast<unsigned>(to_int64(b));
  const auto aa = static_cast<unsigned>(to_int64(a));
  Rational lhs = 1, rhs = 1;
  for (unsigned i = 0; i < bb; ++i) lhs *= ratio;
  for (unsigned i = 0; i < aa; ++i) rhs *= L;
  return lhs <= rhs;
}

// ---------------------------------------------------------------- covering

CoveringLevel::CoveringLevel(const ActionSystem& sys, Rational t, FiniteNet domain,
                             std::uint64_t R_max, std::size_t cap)
    : sys_(sys), t_(std::move(t)), domain_(std::move(domain)), R_max_(R_max) {
  require_t(t_);
  ball_ = warpcone::ball(sys_.group(), R_max_, cap);
}

CoveringPoint CoveringLevel::point(std::size_t k) const {
  const std::size_t n = domain_.size();
  return {ball_.at(k / n), k % n};
}

Rational CoveringLevel::d1(const CoveringPoint& a, const CoveringPoint& b) const {
  const GroupSpec& G = sys_.group();
  const auto l = word_length(multiply(b.gamma, inverse(a.gamma, G), G), G);
  return Rational(static_cast<long>(l)) + t_ * domain_.distance(a.y, b.y);
}

std::size_t CoveringLevel::project(const CoveringPoint& p) const {
  Point z = sys_.apply(p.gamma, domain_.point(p.y));
  auto at = domain_.index_of(z);
  if (!at) throw ClosureError("projection leaves the domain", word_length(p.gamma, sys_.group()));
  return *at;
}

std::vector<Rational> CoveringLevel::d1_table(std::size_t cap) const {
  const std::size_t N = size();
  if (N > cap) throw CapacityError("covering table too large", cap);
  std::vector<Rational> out(N * N);
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b) out[a * N + b] = d1(point(a), point(b));
  return out;
}

CoveringLevel covering_level(const ActionSystem& sys, const Rational& t, const FiniteNet& domain,
                             std::uint64_t R_max) {
  if (sys.isometric() != true)
    throw UnsupportedError("covering levels are provided for verified isometric actions only");
  return CoveringLevel(sys, t, domain, R_max);
}

namespace {

void require_matching(const CoveringLevel& cov, const WarpedLevel& warped) {
  if (cov.t() != warped.t()) throw DomainMismatchError("covering and warped level differ in t");
  if (cov.domain().points() != warped.domain().points())
    throw DomainMismatchError("covering and warped level differ in domain");
}

}  // namespace

bool is_faithfulness_violation(const CoveringLevel& cov, const WarpedLevel& warped,
                               const CoveringPoint& a, const CoveringPoint& b) {
  require_matching(cov, warped);
  const std::size_t ia = cov.project(a), ib = cov.project(b);
  return warped.distance(ia, ib) != cov.d1(a, b);
}

FaithfulnessReport faithfulness_radius(const CoveringLevel& cov, const WarpedLevel& warped,
                                       std::uint64_t R_probe, Exec exec) {
  require_matching(cov, warped);
  if (R_probe > cov.R_max())
    throw ClosureError("probe radius exceeds the covering ball radius", R_probe);
  const GroupSpec& G = cov.system().group();
  const FiniteNet& dom = cov.domain();
  const std::size_t n = dom.size();
  const int128 unit = to_int128(warped.den());
  const int128 Rn = static_cast<int128>(R_probe) * unit;

  const auto words = ball_by_length(G, R_probe);
  const std::size_t B = words.size();
  std::vector<std::uint32_t> len(B);
  for (std::size_t g = 0; g < B; ++g) len[g] = static_cast<std::uint32_t>(word_length(words[g], G));
  std::vector<std::uint32_t> rel(B * B);
  for (std::size_t a = 0; a < B; ++a)
    for (std::size_t b = 0; b < B; ++b)
      rel[a * B + b] = static_cast<std::uint32_t>(word_length(multiply(words[b], inverse(words[a], G), G), G));
  std::vector<std::uint32_t> img(B * n);
  for (std::size_t g = 0; g < B; ++g)
    for (std::size_t y = 0; y < n; ++y) {
      auto at = dom.index_of(cov.system().apply(words[g], dom.point(y)));
      if (!at) throw ClosureError("domain is not closed under the probe ball", R_probe);
      img[g * n + y] = static_cast<std::uint32_t>(*at);
    }

  struct Found {
    int128 level = kInf;
    std::size_t center = 0, a = 0, b = 0;  // a, b: (word index, point) packed below
    std::size_t ga = 0, ya = 0, gb = 0, yb = 0;
    int128 d1 = 0, dw = 0;
  };
  std::vector<Found> per(n);
  const auto N = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 8) if (exec == Exec::Parallel)
  for (std::int64_t ci = 0; ci < N; ++ci) {
    const auto y = static_cast<std::size_t>(ci);
    struct Member {
      int128 rho;
      std::size_t g, yp;
    };
    std::vector<std::pair<std::size_t, int128>> near;
    for (std::size_t yp = 0; yp < n; ++yp) {
      int128 d = warped.base_num(y, yp);
      if (d <= Rn) near.emplace_back(yp, d);
    }
    std::vector<Member> mem;
    for (std::size_t g = 0; g < B; ++g)
      for (auto& [yp, d] : near) {
        int128 rho = static_cast<int128>(len[g]) * unit + d;
        if (rho <= Rn) mem.push_back({rho, g, yp});
      }
    std::stable_sort(mem.begin(), mem.end(), [](const Member& u, const Member& v) { return u.rho < v.rho; });
    Found best;
    for (std::size_t bi = 0; bi < mem.size(); ++bi) {
      if (mem[bi].rho > best.level) break;
      for (std::size_t ai = 0; ai < bi; ++ai) {
        const Member& A = mem[ai];
        const Member& Bm = mem[bi];
        const int128 d1 = static_cast<int128>(rel[A.g * B + Bm.g]) * unit + warped.base_num(A.yp, Bm.yp);
        const int128 dw = warped.num_below(img[A.g * n + A.yp], img[Bm.g * n + Bm.yp], d1);
        if (dw < d1) {
          if (Bm.rho < best.level) {
            best.level = Bm.rho;
            best.ga = A.g;
            best.ya = A.yp;
            best.gb = Bm.g;
            best.yb = Bm.yp;
            best.d1 = d1;
            best.dw = dw;
            best.center = y;
          }
          break;
        }
      }
    }
    per[y] = best;
  }
  FaithfulnessReport rep;
  rep.probe = R_probe;
  rep.radius = R_probe;
  const Found* worst = nullptr;
  for (const auto& f : per)
    if (f.level < kInf && (!worst || f.level < worst->level)) worst = &f;
  if (worst) {
    rep.violation_level = Rational(from_int128(worst->level), warped.den());
    BigInt c = ceil(rep.violation_level) - 1;
    rep.radius = static_cast<std::uint64_t>(std::max<std::int64_t>(0, to_int64(c)));
    rep.witness_a = CoveringPoint{words[worst->ga], worst->ya};
    rep.witness_b = CoveringPoint{words[worst->gb], worst->yb};
    rep.witness_d1 = Rational(from_int128(worst->d1), warped.den());
    rep.witness_warped = warped.distance(img[worst->ga * n + worst->ya], img[worst->gb * n + worst->yb]);
  }
  return rep;
}

// ---------------------------------------------------------------- export

std::uint64_t content_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t level_hash(const ActionSystem& sys, const Rational& t, const FiniteNet& domain) {
  return content_hash(to_json(sys).dump() + "|" + to_string(t) + "|" + to_json(domain).dump());
}

void write_level_csv(const WarpedLevel& level, std::ostream& out) {
  level.materialize();
  save_matrix_csv(level, out);
}

void save_level_cache(const WarpedLevel& level, std::uint64_t key, const std::string& path) {
  level.materialize();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write cache " + path);
  const std::string den = to_string(level.den());
  const std::uint64_t n = level.size(), dl = den.size();
  f.write("WCL1", 4);
  f.write(reinterpret_cast<const char*>(&key), 8);
  f.write(reinterpret_cast<const char*>(&n), 8);
  f.write(reinterpret_cast<const char*>(&dl), 8);
  f.write(den.data(), static_cast<std::streamsize>(dl));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = level.row(i);
    f.write(reinterpret_cast<const char*>(r.data()), static_cast<std::streamsize>(n * sizeof(int128)));
  }
}

std::optional<std::pair<std::vector<int128>, BigInt>> load_level_cache(const std::string& path,
                                                                      std::uint64_t key) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  char magic[4];
  std::uint64_t k = 0, n = 0, dl = 0;
  f.read(magic, 4);
  f.read(reinterpret_cast<char*>(&k), 8);
  f.read(reinterpret_cast<char*>(&n), 8);
  f.read(reinterpret_cast<char*>(&dl), 8);
  if (!f || std::memcmp(magic, "WCL1", 4) != 0 || k != key || dl > 4096) return std::nullopt;
  std::string den(dl, '\0');
  f.read(den.data(), static_cast<std::streamsize>(dl));
  std::vector<int128> table(n * n);
  f.read(reinterpret_cast<char*>(table.data()), static_cast<std::streamsize>(n * n * sizeof(int128)));
  if (!f) return std::nullopt;
  return std::make_pair(std::move(table), BigInt(den));
}

}  // namespace warpcone

#include "warpcone/qimaps.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <unordered_map>

#include <omp.h>

#include "warpcone/errors.hpp"

namespace warpcone {

namespace {

struct I128Hash {
  std::size_t operator()(int128 x) const noexcept {
    const auto u = static_cast<unsigned __int128>(x);
    const auto lo = static_cast<std::uint64_t>(u), hi = static_cast<std::uint64_t>(u >> 64);
    return std::hash<std::uint64_t>{}(lo ^ (hi * 0x9e3779b97f4a7c15ull));
  }
};

using Pair = std::pair<std::size_t, std::size_t>;

template <class T>
struct Agg {
  T umin, umax;
  Pair pmin, pmax;
};

template <class T>
void absorb(Agg<T>& a, const T& u, Pair p) {
  if (u < a.umin || (u == a.umin && p < a.pmin)) {
    a.umin = u;
    a.pmin = p;
  }
  if (u > a.umax || (u == a.umax && p < a.pmax)) {
    a.umax = u;
    a.pmax = p;
  }
}

template <class T>
void merge(Agg<T>& a, const Agg<T>& b) {
  absorb(a, b.umin, b.pmin);
  absorb(a, b.umax, b.pmax);
}

struct Entry {
  Rational s, umin, umax;
  Pair pmin, pmax;
};

std::vector<Entry> scan_fixed(const MetricMap& f, const FixedView& S, const FixedView& T, Exec exec,
                              std::size_t& pairs) {
  const std::size_t n = f.source->size();
  std::unordered_map<int128, Agg<int128>, I128Hash> total;
  const auto N = static_cast<std::int64_t>(n);
#pragma omp parallel if (exec == Exec::Parallel)
  {
    std::unordered_map<int128, Agg<int128>, I128Hash> local;
#pragma omp for schedule(dynamic, 16) nowait
    for (std::int64_t ii = 0; ii < N; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      const std::size_t fi = f.assign[i];
      for (std::size_t j = i + 1; j < n; ++j) {
        const int128 s = S.num(i, j);
        const int128 u = T.num(fi, f.assign[j]);
        auto [it, fresh] = local.try_emplace(s, Agg<int128>{u, u, {i, j}, {i, j}});
        if (!fresh) absorb(it->second, u, {i, j});
      }
    }
#pragma omp critical
    for (auto& [s, a] : local) {
      auto [it, fresh] = total.try_emplace(s, a);
      if (!fresh) merge(it->second, a);
    }
  }
  pairs = n * (n - 1) / 2;
  const Rational ds(S.den()), dt(T.den());
  std::vector<Entry> out;
  out.reserve(total.size());
  for (auto& [s, a] : total)
    out.push_back({Rational(from_int128(s)) / ds, Rational(from_int128(a.umin)) / dt,
                   Rational(from_int128(a.umax)) / dt, a.pmin, a.pmax});
  std::sort(out.begin(), out.end(), [](const Entry& x, const Entry& y) { return x.s < y.s; });
  return out;
}

std::vector<Entry> scan_rational(const MetricMap& f, std::size_t& pairs) {
  const std::size_t n = f.source->size();
  std::map<Rational, Agg<Rational>> total;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Rational s = f.source->distance(i, j);
      Rational u = f.target->distance(f.assign[i], f.assign[j]);
      auto it = total.find(s);
      if (it == total.end())
        total.emplace(s, Agg<Rational>{u, u, {i, j}, {i, j}});
      else
        absorb(it->second, u, {i, j});
    }
  pairs = n * (n - 1) / 2;
  std::vector<Entry> out;
  for (auto& [s, a] : total) out.push_back({s, a.umin, a.umax, a.pmin, a.pmax});
  return out;
}

struct GridValue {
  std::optional<Rational> C;
  Pair upper{0, 0}, lower{0, 0};
};

// Exact minimal C >= 1 for a fixed A over the aggregated entries.
GridValue solve_C(const std::vector<Entry>& es, const Rational& A) {
  GridValue g;
  Rational C = 1;
  for (const auto& e : es) {
    if (e.s == 0) {
      if (e.umax > A) return g;
      continue;
    }
    if (e.umax > A) {
      Rational r = (e.umax - A) / e.s;
      if (r > C) {
        C = r;
        g.upper = e.pmax;
      }
    }
    const Rational den = e.umin + A;
    if (den == 0) {
      g.lower = e.pmin;
      g.C.reset();
      return g;
    }
    Rational r = e.s / den;
    if (r > C) {
      C = r;
      g.lower = e.pmin;
    }
  }
  g.C = C;
  return g;
}

std::optional<Rational> codensity_of(const MetricMap& f, Exec exec) {
  const IndexedMetric& T = *f.target;
  std::vector<std::size_t> img(f.assign);
  std::sort(img.begin(), img.end());
  img.erase(std::unique(img.begin(), img.end()), img.end());
  const std::size_t m = T.size();
  if (const FixedView* fx = T.fixed()) {
    int128 worst = 0;
    const auto M = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(dynamic, 64) reduction(max : worst) if (exec == Exec::Parallel)
    for (std::int64_t jj = 0; jj < M; ++jj) {
      int128 best = -1;
      for (auto i : img) {
        const int128 d = fx->num(i, static_cast<std::size_t>(jj));
        if (best < 0 || d < best) best = d;
        if (best == 0) break;
      }
      worst = std::max(worst, best);
    }
    return Rational(from_int128(worst)) / Rational(fx->den());
  }
  Rational worst = 0;
  for (std::size_t j = 0; j < m; ++j) {
    std::optional<Rational> best;
    for (auto i : img) {
      Rational d = T.distance(i, j);
      if (!best || d < *best) best = d;
    }
    if (best && *best > worst) worst = *best;
  }
  return worst;
}

DistortionReport finish(const MetricMap& f, std::vector<Entry> es, std::size_t pairs,
                        const DistortionOptions& opt, bool fixed_point) {
  DistortionReport r;
  r.pairs = pairs;
  r.fixed_point = fixed_point;
  if (opt.A_step <= 0 || opt.A_max < 0) throw ValidationError("A grid needs a positive step");
  std::vector<GridValue> grid;
  for (Rational A = 0; A <= opt.A_max; A += opt.A_step) {
    grid.push_back(solve_C(es, A));
    r.frontier.emplace_back(A, grid.back().C);
  }
  if (opt.fixed_C) {
    const Rational C = *opt.fixed_C;
    if (C < 1) throw ValidationError("fixed C must be >= 1");
    Rational A = 0;
    for (const auto& e : es) {
      Rational up = e.umax - C * e.s, lo = e.s / C - e.umin;
      if (up > A) {
        A = up;
        r.upper_pair = e.pmax;
      }
      if (lo > A) {
        A = lo;
        r.lower_pair = e.pmin;
      }
    }
    r.C = C;
    r.A = A;
  } else {
    std::optional<std::size_t> pick;
    for (std::size_t k = 0; k < grid.size() && !pick; ++k)
      if (grid[k].C && (!opt.C_budget || *grid[k].C <= *opt.C_budget)) pick = k;
    if (!pick) {
      const GridValue& last = grid.back();
      const Pair p = last.lower != Pair{0, 0} ? last.lower : last.upper;
      throw QuasiIsometryError("not a quasi-isometric embedding at this additive budget (A_max " +
                                   to_string(opt.A_max) + "); binding pair (" +
                                   f.source->label(p.first) + ", " + f.source->label(p.second) + ")",
                               p.first, p.second);
    }
    r.A = r.frontier[*pick].first;
    r.C = *grid[*pick].C;
    r.upper_pair = grid[*pick].upper;
    r.lower_pair = grid[*pick].lower;
  }
  if (!es.empty() && opt.buckets > 0) {
    const Rational maxs = es.back().s;
    std::map<std::size_t, DistortionBucket> bs;
    for (const auto& e : es) {
      std::size_t k = 0;
      if (maxs > 0) {
        BigInt idx = floor(e.s * Rational(static_cast<long>(opt.buckets)) / maxs);
        k = std::min<std::size_t>(opt.buckets - 1, static_cast<std::size_t>(to_int64(idx)));
      }
      auto it = bs.find(k);
      if (it == bs.end()) {
        const Rational w = maxs / Rational(static_cast<long>(opt.buckets));
        bs.emplace(k, DistortionBucket{w * Rational(static_cast<long>(k)),
                                       w * Rational(static_cast<long>(k + 1)), e.umin, e.umax});
      } else {
        it->second.min = std::min(it->second.min, e.umin);
        it->second.max = std::max(it->second.max, e.umax);
      }
    }
    for (auto& [k, b] : bs) r.buckets.push_back(b);
  }
  if (opt.codensity) r.codensity = codensity_of(f, opt.exec);
  return r;
}

void check_map(const MetricMap& f) {
  if (!f.source || !f.target) throw ValidationError("map needs a source and a target");
  if (f.source->size() < 2) throw ValidationError("distortion needs at least two source points");
  if (f.assign.size() != f.source->size()) throw ValidationError("assignment is not total");
  for (auto a : f.assign)
    if (a >= f.target->size()) throw ValidationError("assignment leaves the target");
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

MetricMap compose(const MetricMap& f, const MetricMap& g) {
  if (f.target->size() != g.source->size()) throw DomainMismatchError("maps do not compose");
  MetricMap h{f.source, g.target, {}};
  for (auto a : f.assign) h.assign.push_back(g.assign.at(a));
  return h;
}

std::optional<Rational> DistortionReport::C_at(const Rational& A) const {
  for (const auto& [a, c] : frontier)
    if (a == A) return c;
  return std::nullopt;
}

DistortionReport measure_distortion(const MetricMap& f, const DistortionOptions& opt) {
  check_map(f);
  const FixedView* S = f.source->fixed();
  const FixedView* T = f.target->fixed();
  std::size_t pairs = 0;
  if (S && T) return finish(f, scan_fixed(f, *S, *T, opt.exec, pairs), pairs, opt, true);
  return finish(f, scan_rational(f, pairs), pairs, opt, false);
}

DistortionReport measure_distortion_reference(const MetricMap& f, const DistortionOptions& opt) {
  check_map(f);
  std::size_t pairs = 0;
  DistortionOptions o = opt;
  o.exec = Exec::Serial;
  return finish(f, scan_rational(f, pairs), pairs, o, false);
}

nlohmann::json to_json(const DistortionReport& r) {
  nlohmann::json j;
  j["C"] = to_string(r.C);
  j["A"] = to_string(r.A);
  j["codensity"] = r.codensity ? nlohmann::json(to_string(*r.codensity)) : nlohmann::json(nullptr);
  j["buckets"] = nlohmann::json::array();
  for (const auto& b : r.buckets)
    j["buckets"].push_back({{"lo", to_string(b.lo)},
                            {"hi", to_string(b.hi)},
                            {"min", to_string(b.min)},
                            {"max", to_string(b.max)}});
  j["frontier"] = nlohmann::json::array();
  for (const auto& [a, c] : r.frontier)
    j["frontier"].push_back({{"A", to_string(a)}, {"C", c ? nlohmann::json(to_string(*c)) : nlohmann::json(nullptr)}});
  j["pairs"] = r.pairs;
  j["upper_pair"] = {r.upper_pair.first, r.upper_pair.second};
  j["lower_pair"] = {r.lower_pair.first, r.lower_pair.second};
  return j;
}

// ---------------------------------------------------------------- iota

Point iota_point(const Rational& z, const BigInt& q, const std::vector<BigInt>& r) {
  Point p{mod1(Rational(q) * z)};
  for (const auto& ri : r) p.push_back(mod1(Rational(ri) * z));
  return p;
}

IotaMap build_iota(const TechnicalReport& cert, const BigInt& q, const std::vector<BigInt>& p,
                   const Rational& l, const ActionSystem& beta_sys, const WarpedLevel& source) {
  if (!cert.ok) throw ValidationError("technical conditions not certified: " + cert.diagnosis);
  const std::size_t m = p.size();
  if (cert.factors.size() != m || cert.p_prime.size() != m)
    throw ValidationError("certificate does not match p");
  if (source.t() != l * Rational(q)) throw ValidationError("source level must sit at t = l q");
  if (source.domain().kind() != NetKind::CircleQ) throw ValidationError("source domain must be a circle net");
  const auto& maps = beta_sys.basic_maps();
  if (maps.size() != m) throw ValidationError("beta system needs one rotation per p_i");
  for (std::size_t i = 0; i < m; ++i)
    if (maps[i].type() != MapType::Rotation || mod1(maps[i].values()[0]) != mod1(Rational(p[i], q)))
      throw ValidationError("beta system must rotate by p_i/q");

  IotaMap out;
  out.q = q;
  out.factors = cert.factors;
  for (std::size_t i = 0; i < m; ++i) {
    const BigInt li = cert.factors[i];
    BigInt others = 1;
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) others *= cert.factors[j];
    if (li == 1) {
      out.r.push_back(0);
      continue;
    }
    // r_i = r_i' prod_{j != i} l_j is the inverse of p_i' mod l_i
    BigInt rp = mod(mod_inverse(cert.p_prime[i], li) * mod_inverse(mod(others, li), li), li);
    out.r.push_back(rp * others);
  }
  const FiniteNet& dom = source.domain();
  std::vector<Point> imgs;
  for (const auto& z : dom.points()) imgs.push_back(iota_point(z[0], q, out.r));
  std::vector<Point> uniq = imgs;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<Rational> scales{l};
  for (const auto& li : cert.factors) scales.push_back(Rational(li));
  out.target = FiniteNet::torus(uniq, scales, TorusNorm::L1);
  out.map.source = share(source);
  out.map.target = share(out.target);
  for (const auto& im : imgs) out.map.assign.push_back(*out.target.index_of(im));

  out.equivariant = true;
  for (const auto& z : dom.points())
    for (std::size_t i = 0; i < m && out.equivariant; ++i) {
      Point lhs = iota_point(beta_sys.basic_maps()[i].apply_power(z, 1, beta_sys.space())[0], q, out.r);
      Point rhs = iota_point(z[0], q, out.r);
      rhs[i + 1] = mod1(rhs[i + 1] + Rational(BigInt(1), cert.factors[i]));
      if (lhs != rhs) out.equivariant = false;
    }
  return out;
}

// ---------------------------------------------------------------- substitution

SubstitutionReport substitute_angle(const WarpedLevel& alpha_level, const WarpedLevel& beta_level,
                                    const std::vector<Interval>& alpha,
                                    const std::vector<BigInt>& p, const BigInt& q,
                                    const Rational& l, const Rational& K,
                                    const DistortionOptions& opt) {
  if (alpha_level.t() != beta_level.t()) throw DomainMismatchError("levels differ in t");
  if (alpha_level.domain().points() != beta_level.domain().points())
    throw DomainMismatchError("point sets differ");
  if (alpha.size() != p.size() || p.empty()) throw ValidationError("need one bracket per p_i");
  SubstitutionReport out;
  out.map.source = share(alpha_level);
  out.map.target = share(beta_level);
  for (std::size_t i = 0; i < alpha_level.size(); ++i) out.map.assign.push_back(i);
  DistortionOptions o = opt;
  o.codensity = false;
  out.report = measure_distortion(out.map, o);
  auto c0 = out.report.C_at(0);
  out.C0 = c0 ? *c0 : Rational(-1);
  bool first = true;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Interval& a = alpha[i];
    Rational x = l * abs(Rational(q) * a.lo - Rational(p[i]));
    Rational y = l * abs(Rational(q) * a.hi - Rational(p[i]));
    const Rational mid = Rational(p[i], q);
    Interval g{(a.lo <= mid && mid <= a.hi) ? Rational(0) : std::min(x, y), std::max(x, y), a.open};
    if (first || g.hi > out.K_gap.hi) out.K_gap = g;
    first = false;
  }
  out.K_certified = out.K_gap.hi <= K;
  out.within_bound = c0.has_value() && *c0 <= K + 1;
  out.flagged = !(out.K_certified && out.within_bound);
  return out;
}

// ---------------------------------------------------------------- quotients

QuotientResult quotient_map(const ActionSystem& sys, std::size_t factor, const Rational& t,
                            const FiniteNet& domain, Exec exec) {
  const GroupSpec& G = sys.group();
  if (!G.is_abelian()) throw UnsupportedError("quotients are supported for abelian systems");
  const auto& orders = G.orders();
  if (factor >= orders.size()) throw ValidationError("no such factor");
  const std::int64_t ord = orders[factor];
  if (ord == 0) throw ValidationError("factor is infinite");

  const std::size_t n = domain.size();
  std::vector<Word> F;
  for (std::int64_t k = 0; k < ord; ++k) {
    Word w{std::vector<std::int64_t>(orders.size(), 0)};
    w.nf[factor] = k;
    F.push_back(w);
  }
  // F-images of every domain point
  std::vector<std::vector<std::size_t>> img(F.size(), std::vector<std::size_t>(n));
  for (std::size_t k = 0; k < F.size(); ++k)
    for (std::size_t y = 0; y < n; ++y) {
      auto at = domain.index_of(sys.apply(F[k], domain.point(y)));
      if (!at) throw ClosureError("domain is not invariant under F");
      img[k][y] = *at;
    }
  for (std::size_t k = 1; k < F.size(); ++k)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (domain.distance(img[k][a], img[k][b]) != domain.distance(a, b))
          throw UnsupportedError("F does not act isometrically on the domain");

  QuotientResult out;
  out.class_of.assign(n, n);
  std::vector<std::vector<std::size_t>> orbits;
  for (std::size_t y = 0; y < n; ++y) {
    if (out.class_of[y] != n) continue;
    std::vector<std::size_t> orb;
    for (std::size_t k = 0; k < F.size(); ++k) orb.push_back(img[k][y]);
    std::sort(orb.begin(), orb.end());
    orb.erase(std::unique(orb.begin(), orb.end()), orb.end());
    for (auto z : orb) out.class_of[z] = orbits.size();
    orbits.push_back(orb);
  }
  QuotientNet qn = quotient_by_finite_group(domain, orbits);
  out.quotient = qn.as_net();

  // Gamma/F acting on classes
  std::vector<std::int64_t> rest;
  std::vector<GeneratorMap> maps;
  std::size_t basic = 0;
  for (std::size_t j = 0; j < orders.size(); ++j) {
    if (orders[j] == 1) continue;
    if (j != factor) {
      rest.push_back(orders[j]);
      std::vector<std::size_t> perm(orbits.size());
      for (std::size_t c = 0; c < orbits.size(); ++c) {
        const Point& rep = domain.point(orbits[c][0]);
        auto at = domain.index_of(sys.basic_maps()[basic].apply_power(rep, 1, sys.space()));
        if (!at) throw ClosureError("domain is not invariant under the group");
        perm[c] = out.class_of[*at];
      }
      maps.push_back(GeneratorMap::permutation(perm));
    }
    ++basic;
  }
  const bool infinite = std::count(rest.begin(), rest.end(), 0) > 0;
  GroupSpec Q = rest.empty()         ? GroupSpec::finite_cyclic(1)
                : infinite           ? GroupSpec::abelian_product(rest)
                : rest.size() == 1   ? GroupSpec::finite_cyclic(rest[0])
                                     : GroupSpec::finite_abelian_product(rest);
  ActionSystem tsys(Q, out.quotient, maps);
  tsys.verify_isometric(out.quotient);
  out.target_system = tsys;

  auto level = [&](const ActionSystem& s, const FiniteNet& d) {
    if (s.isometric() == true) return warped_closed_form_level(s, t, d);
    return warped_distance_graph(s, t, d, std::nullopt, exec);
  };
  WarpedLevel src = level(sys, domain);
  WarpedLevel dst = level(tsys, out.quotient);
  src.materialize(exec);
  dst.materialize(exec);
  out.map.source = share(src);
  out.map.target = share(dst);
  out.map.assign = out.class_of;
  DistortionOptions o;
  o.fixed_C = Rational(1);
  o.exec = exec;
  out.report = measure_distortion(out.map, o);
  out.orbit_diameter = 0;
  for (const auto& orb : orbits)
    for (auto a : orb)
      for (auto b : orb) out.orbit_diameter = std::max(out.orbit_diameter, src.distance(a, b));
  out.ok = out.report.C == 1 && out.report.A <= out.orbit_diameter;
  return out;
}

// ---------------------------------------------------------------- cocycles

Cocycle extract_cocycle(const ActionSystem& src, const FiniteNet& src_dom, const ActionSystem& dst,
                        const FiniteNet& dst_dom, const std::vector<std::size_t>& f,
                        std::uint64_t R, std::uint64_t R_target) {
  const std::size_t n = src_dom.size();
  if (f.size() != n) throw ValidationError("map must be total on the source domain");
  for (auto v : f)
    if (v >= dst_dom.size()) throw ValidationError("map leaves the target domain");
  Cocycle c;
  c.source_group = src.group();
  c.target_group = dst.group();
  c.gammas = ball(src.group(), R);
  c.n = n;
  const auto deltas = ball(dst.group(), R_target);
  const Word e = dst.group().identity();

  // orbit tables of the target, filled on demand
  std::map<std::size_t, std::multimap<std::size_t, std::size_t>> orbit;
  auto orbit_of = [&](std::size_t w) -> const std::multimap<std::size_t, std::size_t>& {
    auto it = orbit.find(w);
    if (it != orbit.end()) return it->second;
    std::multimap<std::size_t, std::size_t> mm;
    for (std::size_t d = 0; d < deltas.size(); ++d) {
      auto at = dst_dom.index_of(dst.apply(deltas[d], dst_dom.point(w)));
      if (at) mm.emplace(*at, d);
    }
    return orbit.emplace(w, std::move(mm)).first->second;
  };

  c.delta.reserve(c.gammas.size() * n);
  for (std::size_t g = 0; g < c.gammas.size(); ++g)
    for (std::size_t y = 0; y < n; ++y) {
      auto gy = src_dom.index_of(src.apply(c.gammas[g], src_dom.point(y)));
      if (!gy) throw ClosureError("source domain is not closed under the ball", R);
      const auto& mm = orbit_of(f[y]);
      auto [lo, hi] = mm.equal_range(f[*gy]);
      const std::string where = "g=" + to_string(c.gammas[g], src.group()) + ", y=" + src_dom.label(y);
      if (lo == hi) throw OrbitPreservationError("f(g y) is outside the target orbit of f(y) at " + where);
      if (std::next(lo) != hi) throw DegenerateActionError("target action is not free: several delta at " + where);
      c.delta.push_back(deltas[lo->second]);
    }

  c.constant.assign(c.gammas.size(), true);
  for (std::size_t g = 0; g < c.gammas.size(); ++g)
    for (std::size_t y = 1; y < n; ++y)
      if (c.at(g, y) != c.at(g, 0)) c.constant[g] = false;
  if (n > 0 && std::all_of(c.constant.begin(), c.constant.end(), [](bool b) { return b; })) {
    std::vector<Word> hom;
    for (std::size_t g = 0; g < c.gammas.size(); ++g) {
      hom.push_back(c.at(g, 0));
      if (c.at(g, 0) == e) c.kernel.push_back(c.gammas[g]);
    }
    c.homomorphism = std::move(hom);
  }

  c.identity_holds = true;
  std::map<Word, std::size_t> index;
  for (std::size_t g = 0; g < c.gammas.size(); ++g) index.emplace(c.gammas[g], g);
  for (std::size_t g1 = 0; g1 < c.gammas.size() && c.identity_holds; ++g1)
    for (std::size_t g2 = 0; g2 < c.gammas.size() && c.identity_holds; ++g2) {
      if (!index.count(multiply(c.gammas[g2], c.gammas[g1], src.group()))) continue;
      for (std::size_t y = 0; y < n; ++y)
        if (!cocycle_identity_holds(c, src, src_dom, g1, g2, y)) {
          c.identity_holds = false;
          break;
        }
    }
  return c;
}

bool cocycle_identity_holds(const Cocycle& c, const ActionSystem& src, const FiniteNet& src_dom,
                            std::size_t g1, std::size_t g2, std::size_t y) {
  const Word prod = multiply(c.gammas.at(g2), c.gammas.at(g1), c.source_group);
  auto it = std::find(c.gammas.begin(), c.gammas.end(), prod);
  if (it == c.gammas.end()) throw ValidationError("g2 g1 lies outside the cocycle ball");
  const auto g21 = static_cast<std::size_t>(it - c.gammas.begin());
  auto g1y = src_dom.index_of(src.apply(c.gammas[g1], src_dom.point(y)));
  if (!g1y) throw ClosureError("source domain is not closed under the ball");
  const Word lhs = multiply(c.at(g2, *g1y), c.at(g1, y), c.target_group);
  return lhs == c.at(g21, y);
}

void write_cocycle_csv(const Cocycle& c, const FiniteNet& src_dom, std::ostream& out) {
  out << "gamma,y,delta\n";
  for (std::size_t g = 0; g < c.gammas.size(); ++g)
    for (std::size_t y = 0; y < c.n; ++y)
      out << quote(to_string(c.gammas[g], c.source_group)) << ',' << quote(src_dom.label(y)) << ','
          << quote(to_string(c.at(g, y), c.target_group)) << '\n';
}

}  // namespace warpcone

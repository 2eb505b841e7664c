// Acceptance suite: one line per criterion, exit status 0 iff all pass.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "warpcone/errors.hpp"
#include "warpcone/experiments.hpp"

using namespace warpcone;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = "failed: " + what;
    pass = pass && ok;
  }
};

ActionSystem rotations(GroupSpec G, const FiniteNet& space, const std::vector<Rational>& angles) {
  std::vector<GeneratorMap> maps;
  for (auto& a : angles) maps.push_back(GeneratorMap::rotation({a}));
  ActionSystem sys(std::move(G), space, maps);
  sys.verify_isometric(space);
  return sys;
}

// Shortest paths with edges t d(x, y) and unit generator jumps, Floyd-Warshall in rationals.
std::vector<Rational> floyd(const ActionSystem& sys, const Rational& t, const FiniteNet& dom) {
  const std::size_t n = dom.size();
  std::vector<Rational> d(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = t * dom.distance(i, j);
  for (std::size_t g = 0; g < sys.group().generators().size(); ++g)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = *dom.index_of(sys.apply_generator(g, dom.point(i)));
      if (d[i * n + j] > 1) d[i * n + j] = 1;
    }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i * n + k] + d[k * n + j] < d[i * n + j]) d[i * n + j] = d[i * n + k] + d[k * n + j];
  return d;
}

std::vector<std::pair<Rational, Rational>> pl_breaks() {
  return {{0, 0}, {Rational(1, 2), Rational(1, 3)}, {1, 1}};
}

// Conjugate of the 1/n rotation by a piecewise-linear h with slopes 2/3 and 4/3 (L = 2).
std::pair<ActionSystem, FiniteNet> pl_system(long n) {
  const auto full = pl_breaks();
  std::vector<Rational> pts;
  for (long k = 0; k < n; ++k) pts.push_back(pl_eval(full, Rational(k, n)));
  FiniteNet dom = FiniteNet::circle(pts);
  ActionSystem sys(GroupSpec::free_abelian(1), dom,
                   {GeneratorMap::pl_conjugate(Rational(1, n), {full[1]})});
  sys.verify_lipschitz(dom);
  return {sys, dom};
}

// ---------------------------------------------------------------- criteria

Outcome c1() {
  Outcome o;
  auto cf = golden_cf(40);
  auto cv = convergents(cf, 39);
  BigInt f0 = 0, f1 = 1;  // Fibonacci: p_i = F_i, q_i = F_{i+1}
  for (std::size_t i = 0; i < cv.size(); ++i) {
    o.require(cv[i].p == f0 && cv[i].q == f1, "convergent " + std::to_string(i) + " is not a Fibonacci ratio");
    BigInt f2 = f0 + f1;
    f0 = f1;
    f1 = f2;
    if (i >= 1) {
      const BigInt det = cv[i].p * cv[i - 1].q - cv[i - 1].p * cv[i].q;
      o.require(det == ((i - 1) % 2 ? -1 : 1), "determinant identity at " + std::to_string(i));
    }
  }
  // (sqrt 5 - 1)/2 to 80 digits from an integer square root
  const BigInt scale = boost::multiprecision::pow(BigInt(10), 80);
  BigInt s5 = 5 * scale * scale;
  BigInt root = boost::multiprecision::sqrt(s5);
  const Interval phi{Rational(root - scale, 2 * scale), Rational(root + 1 - scale, 2 * scale)};
  std::size_t checked = 0;
  for (std::size_t i = 0; i <= 38; ++i) {
    auto b = verify_approximation_bound(cf, i);
    o.require(b.holds, "approximation bound at " + std::to_string(i));
    const Rational x = cv[i].value();
    const Rational gap = std::max(abs(phi.lo - x), abs(phi.hi - x));
    o.require(gap < Rational(1, cv[i].q * cv[i + 1].q) || i == 0, "oracle bound at " + std::to_string(i));
    ++checked;
  }
  o.detail = o.pass ? "determinants i=1..39, bound certified for " + std::to_string(checked) + " indices" : o.detail;
  return o;
}

Outcome c2() {
  Outcome o;
  std::vector<std::pair<std::string, std::pair<ActionSystem, FiniteNet>>> systems;
  for (auto a : {Rational(1, 3), Rational(2, 5), Rational(3, 7)}) {
    FiniteNet dom = circle_net(4 * static_cast<std::int64_t>(denom(a)));
    systems.push_back({to_string(a), {rotations(GroupSpec::free_abelian(1), dom, {a}), dom}});
  }
  {
    FiniteNet dom = circle_net(14);
    ActionSystem d(GroupSpec::infinite_dihedral(), dom,
                   {GeneratorMap::reflection({Rational(0)}), GeneratorMap::reflection({Rational(2, 7)})});
    d.verify_isometric(dom);
    systems.push_back({"dihedral", {d, dom}});
    ActionSystem e(GroupSpec::infinite_dihedral(DihedralMarking::RotationReflection), dom,
                   {GeneratorMap::rotation({Rational(2, 7)}), GeneratorMap::reflection({Rational(0)})});
    e.verify_isometric(dom);
    systems.push_back({"dihedral eps,r", {e, dom}});
  }
  std::size_t pairs = 0;
  for (auto& [name, sd] : systems) {
    auto& [sys, dom] = sd;
    for (long t = 1; t <= 50; ++t) {
      auto closed = warped_closed_form_level(sys, Rational(t), dom).table();
      auto graph = warped_distance_graph(sys, Rational(t), dom).table();
      auto ref = floyd(sys, Rational(t), dom);
      o.require(closed == ref, name + " closed form vs shortest paths at t=" + std::to_string(t));
      o.require(graph == ref, name + " graph kernel vs shortest paths at t=" + std::to_string(t));
      pairs += ref.size();
    }
  }
  if (o.pass) o.detail = std::to_string(pairs) + " pairs equal across 5 systems, t=1..50";
  return o;
}

Outcome c3() {
  Outcome o;
  auto [sys, dom] = pl_system(240);
  o.require(sys.lipschitz() && *sys.lipschitz() <= 2, "generator Lipschitz constant <= 2");
  const Rational L = 2;
  std::size_t pairs = 0;
  for (long t : {1L, 4L, 16L}) {
    auto g = warped_distance_graph(sys, Rational(t), dom);
    auto D = infimum_level(sys, Rational(t), dom);
    for (std::size_t i = 0; i < dom.size(); ++i)
      for (std::size_t j = 0; j < dom.size(); ++j) {
        const Rational dg = g.distance(i, j), dG = D.distance(i, j);
        o.require(dg <= dG, "d_graph <= D_Gamma");
        if (dg > 0) o.require(power_bound_holds(dG / dg, L, dg), "D_Gamma <= L^d_graph d_graph");
        ++pairs;
      }
  }
  if (o.pass) o.detail = std::to_string(dom.size()) + "-point net, " + std::to_string(pairs) + " pairs, t in {1,4,16}";
  return o;
}

Outcome c4() {
  Outcome o;
  auto cf = golden_cf(64);
  auto cv = convergents(cf, 9);
  Rational worstA = 0, worstD = 0, worstC0 = 0;
  for (std::size_t i = 3; i <= 8; ++i) {
    const BigInt t = cv[i].q * cv[i].q;
    auto L = thm_main_level(cf, 1, t, 1, 6, Exec::Parallel);
    o.require(L.dec.certified && L.dec.q == cv[i].q && L.dec.l == Rational(cv[i].q), "level decomposition at i=" + std::to_string(i));
    o.require(L.substitution_ok, "substitution within K+1 at i=" + std::to_string(i));
    o.require(L.composite.C == 6 && L.composite.A <= 1, "C <= 6, A <= 1 at i=" + std::to_string(i));
    o.require(L.composite.codensity && *L.composite.codensity <= 1, "codensity <= 1 at i=" + std::to_string(i));
    worstA = std::max(worstA, L.composite.A);
    worstC0 = std::max(worstC0, L.C0);
    if (L.composite.codensity) worstD = std::max(worstD, *L.composite.codensity);
  }
  if (o.pass)
    o.detail = "i=3..8: A <= " + to_string(worstA) + " at C=6, codensity <= " + to_string(worstD) +
               ", substitution C0 < " + std::to_string(to_double(worstC0) + 1e-9).substr(0, 6);
  return o;
}

Outcome c5() {
  Outcome o;
  std::string radii;
  for (long t : {10L, 100L, 1000L}) {
    auto F = faithfulness_level(Rational(1, 3), Rational(t), 30, 3, Exec::Parallel);
    o.require(F.report.radius < 2, "radius < 2 for 1/3 at t=" + std::to_string(t));
    o.require(F.witness_violates, "witness (2,y),(-1,y) at t=" + std::to_string(t));
    radii += std::to_string(F.report.radius) + " ";
  }
  auto cf = golden_cf(64);
  auto cv = convergents(cf, 30);
  std::size_t i = 0;
  while (cv[i].q < 4181) ++i;
  const Rational alpha = cv[i].value();
  auto F = faithfulness_level(alpha, Rational(cv[i].q), static_cast<std::int64_t>(cv[i].q), 5, Exec::Parallel);
  o.require(F.report.radius >= 5, "radius >= 5 for " + to_string(alpha));
  if (o.pass)
    o.detail = "1/3 radii " + radii + "with witness; " + to_string(alpha) + " at t=" + to_string(cv[i].q) +
               " radius >= " + std::to_string(F.report.radius);
  return o;
}

Outcome c6() {
  Outcome o;
  const std::vector<std::int64_t> orders{2, 4, 8};
  const std::vector<Rational> a{Rational(1, 3), Rational(1, 9), Rational(1, 27)};
  const std::vector<Rational> f{Rational(1, 100), Rational(1, 54), Rational(1, 27), Rational(1, 20),
                                Rational(1, 18), Rational(1, 9),   Rational(1, 6),  Rational(1, 4),
                                Rational(1, 3),  Rational(1, 2),   Rational(1),     Rational(2)};
  std::size_t runs = 0;
  Rational t = 1;
  for (int k = 0; k <= 6; ++k, t *= 3)
    for (auto& c : f) {
      const Rational R = c * t;
      auto U = ultrametric_level(orders, a, t, R, Exec::Parallel);
      // cylinders below R: the largest weight t a_j under R
      Rational expect = 0;
      for (auto& w : a)
        if (t * w < R) expect = std::max(expect, Rational(t * w));
      o.require(U.components.max_diameter() == expect, "component diameter t a_j");
      o.require(U.components.max_diameter() < R, "diameter < R");
      o.require(U.cover.found && U.cover.best.S < R, "d=0 certificate with S < R");
      o.require(verify_cover(scale(ultrametric_chain(orders, a), t), U.cover.best) == U.cover.best.S,
                "independent certificate check");
      ++runs;
    }
  if (o.pass) o.detail = std::to_string(runs) + " (t, R) pairs, t = 3^0..3^6";
  return o;
}

Outcome c7() {
  Outcome o;
  struct Case {
    std::string name;
    ActionSystem sys;
    FiniteNet dom;
  };
  FiniteNet d40 = circle_net(40), d60 = circle_net(60), d15 = circle_net(15);
  std::vector<Case> cases{
      {"Z x Z/2", rotations(GroupSpec::abelian_product({0, 2}), d40, {Rational(3, 40), Rational(1, 2)}), d40},
      {"Z x Z/3", rotations(GroupSpec::abelian_product({0, 3}), d60, {Rational(7, 60), Rational(1, 3)}), d60},
      {"Z/3 x Z/5", rotations(GroupSpec::finite_abelian_product({3, 5}), d15, {Rational(1, 3), Rational(1, 5)}), d15},
  };
  std::string detail;
  for (auto& c : cases) {
    const std::size_t factor = c.sys.group().orders()[0] == 3 ? 0 : 1;
    for (long t : {1L, 5L, 20L}) {
      auto q = quotient_map(c.sys, factor, Rational(t), c.dom);
      o.require(q.report.C == 1, c.name + " C = 1");
      o.require(q.report.A <= q.orbit_diameter, c.name + " A <= orbit diameter");
      // direct: 1-Lipschitz, exact additive defect, orbit diameter
      Rational A = 0, diam = 0;
      const auto& S = *q.map.source;
      const auto& T = *q.map.target;
      for (std::size_t i = 0; i < c.dom.size(); ++i)
        for (std::size_t j = 0; j < c.dom.size(); ++j) {
          const Rational s = S.distance(i, j), u = T.distance(q.class_of[i], q.class_of[j]);
          o.require(u <= s, c.name + " quotient is 1-Lipschitz");
          A = std::max(A, Rational(s - u));
          if (q.class_of[i] == q.class_of[j]) diam = std::max(diam, s);
        }
      o.require(A == q.report.A, c.name + " additive constant matches direct scan");
      o.require(diam == q.orbit_diameter, c.name + " orbit diameter matches direct scan");
    }
    detail += c.name + " ";
  }
  auto dl = dihedral_level(golden_cf(64), 1, 25, Exec::Parallel);
  o.require(dl.quotient.report.C == 1 && dl.quotient.report.A <= dl.quotient.orbit_diameter, "reflection quotient");
  o.require(dl.decomposition_exact, "dihedral decomposition");
  if (o.pass) o.detail = detail + "and the reflection of a dihedral level: C = 1, A <= diam F";
  return o;
}

Outcome c8() {
  Outcome o;
  Rational lo = 100, hi = 0;
  for (long q : {16L, 32L, 64L})
    for (long N : {1L, 2L, 4L}) {
      auto T = torus_packing({Rational(q), Rational(10 * q)}, Rational(N), Exec::Parallel);
      o.require(T.normalized >= Rational(1, 8) && T.normalized <= 8,
                "v_N N^2/(10 q^2) in [1/8, 8] for q=" + std::to_string(q) + " N=" + std::to_string(N));
      lo = std::min(lo, T.normalized);
      hi = std::max(hi, T.normalized);
    }
  // greedy sets are N-separated (smallest torus)
  std::vector<TorusFactor> f{{circle_net(16), 16}, {circle_net(160), 160}};
  FiniteNet net = torus_product(f);
  for (long N : {2L, 4L}) o.require(is_separated(net, vn_invariant(net, N, 0).greedy, N), "greedy set separated");
  if (o.pass) o.detail = "normalized v_N in [" + to_string(lo) + ", " + to_string(hi) + "]";
  return o;
}

Outcome c9() {
  Outcome o;
  auto H = higher_tori_run(2, {3, 5}, {{1, 1}, {1, 1}}, 2, 50, 70, 153, Exec::Parallel);
  o.require(H.D_rule, "D rule");
  o.require(H.ht.D[0] == std::vector<BigInt>{9, 59049} && H.ht.D[1] == std::vector<BigInt>{5, 15625}, "D values");
  o.require(H.ht.q == 922640625 && H.ht.l == 65536, "q and l");
  o.require(H.cert.ok, "technical conditions with K = 50");
  o.require(H.orbit_points <= 10000, "orbit net within 10^4 points");
  o.require(H.equivariant, "iota equivariant");
  o.require(H.iota.C == 153 && H.iota.A <= 2, "C <= 153, A <= 2");
  if (o.pass)
    o.detail = "q=" + to_string(H.ht.q) + ", " + std::to_string(H.orbit_points) + " orbit points, A=" +
               to_string(H.iota.A) + " at C=153";
  return o;
}

Outcome c10() {
  Outcome o;
  std::mt19937 rng(10);
  std::size_t triples = 0;
  auto check = [&](const std::string& name, const ActionSystem& src, const FiniteNet& sd, const ActionSystem& dst,
                   const FiniteNet& dd, const std::vector<std::size_t>& f, std::uint64_t R, std::uint64_t RT) {
    auto c = extract_cocycle(src, sd, dst, dd, f, R, RT);
    const GroupSpec& G = src.group();
    const GroupSpec& H = dst.group();
    auto index = [&](const Word& w) -> std::optional<std::size_t> {
      auto it = std::find(c.gammas.begin(), c.gammas.end(), w);
      if (it == c.gammas.end()) return std::nullopt;
      return static_cast<std::size_t>(it - c.gammas.begin());
    };
    std::size_t done = 0;
    while (done < 200) {
      const std::size_t g1 = rng() % c.gammas.size(), g2 = rng() % c.gammas.size(), y = rng() % sd.size();
      auto g21 = index(multiply(c.gammas[g2], c.gammas[g1], G));
      if (!g21) continue;
      const std::size_t y1 = *sd.index_of(src.apply(c.gammas[g1], sd.point(y)));
      const Word lhs = multiply(c.at(g2, y1), c.at(g1, y), H);
      o.require(lhs == c.at(*g21, y), name + " cocycle identity");
      o.require(cocycle_identity_holds(c, src, sd, g1, g2, y), name + " library identity check");
      ++done;
    }
    triples += done;
    return c;
  };
  FiniteNet d12 = circle_net(12);
  auto rot = rotations(GroupSpec::free_abelian(1), d12, {Rational(5, 12)});
  std::vector<std::size_t> id(d12.size());
  for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
  auto ci = check("identity", rot, d12, rot, d12, id, 4, 4);
  for (std::size_t g = 0; g < ci.gammas.size(); ++g)
    for (std::size_t y = 0; y < ci.n; ++y) o.require(ci.at(g, y) == ci.gammas[g], "identity gives delta = gamma");

  FiniteNet d7 = circle_net(7);
  auto s2 = rotations(GroupSpec::free_abelian(1), d7, {Rational(2, 7)});
  auto s4 = rotations(GroupSpec::free_abelian(1), d7, {Rational(4, 7)});
  std::vector<std::size_t> dbl(7);
  for (std::size_t i = 0; i < 7; ++i) dbl[i] = *d7.index_of({mod1(2 * d7.point(i)[0])});
  check("doubling", s2, d7, s4, d7, dbl, 3, 3);

  FiniteNet d10 = circle_net(10);
  auto sys = rotations(GroupSpec::abelian_product({0, 2}), d10, {Rational(1, 5), Rational(1, 2)});
  auto q = quotient_map(sys, 1, 2, d10);
  check("quotient by Z/2", sys, d10, *q.target_system, q.quotient, q.class_of, 2, 2);
  if (o.pass) o.detail = std::to_string(triples) + " triples over 3 examples; identity gives delta = gamma";
  return o;
}

Outcome c11() {
  Outcome o;
  std::vector<std::pair<std::string, std::pair<ActionSystem, FiniteNet>>> systems;
  FiniteNet d30 = circle_net(30);
  systems.push_back({"rotation 7/30", {rotations(GroupSpec::free_abelian(1), d30, {Rational(7, 30)}), d30}});
  systems.push_back({"piecewise-linear conjugate", pl_system(60)});
  FiniteNet d14 = circle_net(14);
  ActionSystem d(GroupSpec::infinite_dihedral(), d14,
                 {GeneratorMap::reflection({Rational(0)}), GeneratorMap::reflection({Rational(2, 7)})});
  systems.push_back({"dihedral", {d, d14}});
  Rational worst = 0;
  for (auto& [name, sd] : systems) {
    auto& [sys, dom] = sd;
    auto mc = change_of_metric(sys, dom);
    Rational w = 0;
    for (std::size_t g = 0; g < sys.group().generators().size(); ++g)
      for (std::size_t i = 0; i < dom.size(); ++i)
        for (std::size_t j = 0; j < dom.size(); ++j) {
          if (i == j) continue;
          const std::size_t si = *dom.index_of(sys.apply_generator(g, dom.point(i)));
          const std::size_t sj = *dom.index_of(sys.apply_generator(g, dom.point(j)));
          const Rational nd = mc.eval(dom.distance(i, j));
          o.require(mc.net.distance(i, j) == nd, name + " new metric is c o d");
          w = std::max(w, Rational(mc.eval(dom.distance(si, sj)) / nd));
        }
    o.require(w <= 4, name + " generator Lipschitz constant <= 4");
    o.require(w == mc.max_generator_ratio, name + " reported constant matches direct scan");
    // concave increasing: positive slopes, nonincreasing from 0 outwards
    const auto& b = mc.breakpoints;
    std::vector<Rational> xs{0};
    for (auto it = b.rbegin(); it != b.rend(); ++it) xs.push_back(*it);
    Rational prev = -1;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
      const Rational s = (mc.eval(xs[k + 1]) - mc.eval(xs[k])) / (xs[k + 1] - xs[k]);
      o.require(s > 0, name + " c increasing");
      if (prev >= 0) o.require(s <= prev, name + " c concave");
      prev = s;
    }
    o.require(mc.concave_increasing, name + " reported concave increasing");
    worst = std::max(worst, w);
  }
  if (o.pass) o.detail = "3 systems, worst generator Lipschitz constant " + to_string(worst);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "convergent machinery", 1, c1},
      {2, "warped-metric oracle equivalence", 30, c2},
      {3, "Lipschitz sandwich", 30, c3},
      {4, "restricted angle levels to square tori", 120, c4},
      {5, "faithfulness dichotomy", 60, c5},
      {6, "ultrametric levels", 10, c6},
      {7, "quotient quasi-isometry", 60, c7},
      {8, "unbalanced-tori packing", 60, c8},
      {9, "higher tori", 180, c9},
      {10, "cocycle identity", 10, c10},
      {11, "change of metric", 10, c11},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (s > c.limit_s) {
      if (o.pass) o.detail += "; over the time limit";
      o.pass = false;
    }
    std::printf("[%s] %2d %s: %s (%.2f s, limit %.0f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                s, c.limit_s);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria pass\n", static_cast<int>(all.size()) - failed, all.size());
  return failed ? 1 : 0;
}

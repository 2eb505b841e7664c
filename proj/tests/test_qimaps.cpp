#include <random>
#include <sstream>

#include "doctest.h"
#include "warpcone/errors.hpp"
#include "warpcone/qimaps.hpp"

using namespace warpcone;

namespace {

MetricMap identity_map(const FiniteNet& net) {
  MetricMap f{share(net), share(net), {}};
  for (std::size_t i = 0; i < net.size(); ++i) f.assign.push_back(i);
  return f;
}

// Minimal C >= 1 for a given A by direct pair enumeration.
std::optional<Rational> brute_C(const MetricMap& f, const Rational& A) {
  Rational C = 1;
  for (std::size_t i = 0; i < f.source->size(); ++i)
    for (std::size_t j = i + 1; j < f.source->size(); ++j) {
      const Rational s = f.source->distance(i, j);
      const Rational u = f.target->distance(f.assign[i], f.assign[j]);
      if (u > A) {
        if (s == 0) return std::nullopt;
        C = std::max(C, Rational((u - A) / s));
      }
      if (u + A == 0) {
        if (s > 0) return std::nullopt;
        continue;
      }
      C = std::max(C, Rational(s / (u + A)));
    }
  return C;
}

bool holds(const MetricMap& f, const Rational& C, const Rational& A) {
  for (std::size_t i = 0; i < f.source->size(); ++i)
    for (std::size_t j = i + 1; j < f.source->size(); ++j) {
      const Rational s = f.source->distance(i, j);
      const Rational u = f.target->distance(f.assign[i], f.assign[j]);
      if (u > C * s + A || s / C - A > u) return false;
    }
  return true;
}

void same_report(const DistortionReport& a, const DistortionReport& b) {
  CHECK(a.C == b.C);
  CHECK(a.A == b.A);
  CHECK(a.codensity == b.codensity);
  CHECK(a.frontier == b.frontier);
  REQUIRE(a.buckets.size() == b.buckets.size());
  for (std::size_t k = 0; k < a.buckets.size(); ++k) {
    CHECK(a.buckets[k].lo == b.buckets[k].lo);
    CHECK(a.buckets[k].min == b.buckets[k].min);
    CHECK(a.buckets[k].max == b.buckets[k].max);
  }
}

ActionSystem rotations(GroupSpec G, const FiniteNet& space, std::vector<Rational> angles) {
  std::vector<GeneratorMap> maps;
  for (auto& a : angles) maps.push_back(GeneratorMap::rotation({a}));
  ActionSystem sys(std::move(G), space, maps);
  sys.verify_isometric(space);
  return sys;
}

}  // namespace

TEST_CASE("identity and scaling maps") {
  FiniteNet net = circle_net(12);
  auto r = measure_distortion(identity_map(net));
  CHECK(r.C == 1);
  CHECK(r.A == 0);
  CHECK(*r.codensity == 0);
  CHECK(r.fixed_point);

  FiniteNet twice = scale(net, 2);
  MetricMap f{share(net), share(twice), identity_map(net).assign};
  auto s = measure_distortion(f);
  CHECK(s.C == 2);
  CHECK(s.A == 0);
  same_report(s, measure_distortion_reference(f));
}

TEST_CASE("constant map collapses a distance") {
  FiniteNet two = FiniteNet::circle({Rational(0), Rational(1, 2)}, 10);
  MetricMap f{share(two), share(two), {0, 0}};
  DistortionOptions o;
  o.C_budget = Rational(1);
  o.A_max = 4;
  try {
    measure_distortion(f, o);
    FAIL("expected a failure");
  } catch (const QuasiIsometryError& e) {
    CHECK(e.first() == 0);
    CHECK(e.second() == 1);
  }
  o.A_max = 8;
  auto r = measure_distortion(f, o);
  CHECK(r.A == 5);
  CHECK(r.C == 1);
}

TEST_CASE("distortion matches brute force on random maps") {
  std::mt19937 rng(7);
  FiniteNet src = circle_net(14);
  FiniteNet dst = scale(circle_net(9), 3);
  for (int trial = 0; trial < 20; ++trial) {
    MetricMap f{share(src), share(dst), {}};
    for (std::size_t i = 0; i < src.size(); ++i) f.assign.push_back(rng() % dst.size());
    DistortionOptions o;
    o.A_max = 6;
    auto r = measure_distortion(f, o);
    for (const auto& [A, C] : r.frontier) CHECK(C == brute_C(f, A));
    CHECK(holds(f, r.C, r.A));
    CHECK(brute_C(f, r.A) == r.C);
    // no smaller grid value admits a finite C
    for (const auto& [A, C] : r.frontier)
      if (A < r.A) CHECK_FALSE(C.has_value());
    same_report(r, measure_distortion_reference(f, o));
    o.exec = Exec::Serial;
    same_report(r, measure_distortion(f, o));
    for (const auto& b : r.buckets) CHECK(b.min <= b.max);
    CHECK(r.buckets.size() <= 16);

    DistortionOptions fx;
    fx.fixed_C = Rational(3, 2);
    auto g = measure_distortion(f, fx);
    Rational A = 0;
    for (std::size_t i = 0; i < src.size(); ++i)
      for (std::size_t j = i + 1; j < src.size(); ++j) {
        const Rational s = src.distance(i, j), u = dst.distance(f.assign[i], f.assign[j]);
        A = std::max({A, Rational(u - Rational(3, 2) * s), Rational(s / Rational(3, 2) - u)});
      }
    CHECK(g.A == A);
  }
}

TEST_CASE("post-composition with an isometry leaves the report unchanged") {
  FiniteNet src = circle_net(10);
  FiniteNet dst = scale(circle_net(20), 4);
  MetricMap f{share(src), share(dst), {}};
  for (std::size_t i = 0; i < src.size(); ++i) f.assign.push_back((3 * i) % dst.size());
  MetricMap rot{share(dst), share(dst), {}};
  for (std::size_t i = 0; i < dst.size(); ++i) rot.assign.push_back((i + 7) % dst.size());
  DistortionOptions o;
  o.codensity = true;
  same_report(measure_distortion(f, o), measure_distortion(compose(f, rot), o));
}

TEST_CASE("codensity against a direct scan") {
  FiniteNet src = circle_net(5);
  FiniteNet dst = circle_net(40);
  MetricMap f{share(src), share(dst), {}};
  for (std::size_t i = 0; i < src.size(); ++i) f.assign.push_back(8 * i);
  auto r = measure_distortion(f);
  CHECK(*r.codensity == Rational(1, 10));
}

TEST_CASE("iota values") {
  CHECK(iota_point(0, BigInt(15), {BigInt(10), BigInt(6)}) == Point{0, 0, 0});
  CHECK(iota_point(Rational(1, 5), BigInt(5), {BigInt(2)}) == Point{0, Rational(2, 5)});
  CHECK(iota_point(Rational(1, 15), BigInt(15), {BigInt(10), BigInt(6)}) ==
        Point{0, Rational(2, 3), Rational(2, 5)});
}

TEST_CASE("build_iota computes r from the certificate and is equivariant") {
  const BigInt q = 15;
  const std::vector<BigInt> p{5, 3};
  std::vector<Interval> alpha{{Rational(5, 15), Rational(5, 15)}, {Rational(3, 15), Rational(3, 15)}};
  const Rational l = 15;
  auto cert = verify_technical_conditions(q, p, alpha, l, 1);
  REQUIRE(cert.ok);
  FiniteNet dom = circle_net(30);
  auto beta = rotations(GroupSpec::free_abelian(2), dom, {Rational(1, 3), Rational(1, 5)});
  auto level = warped_closed_form_level(beta, l * Rational(q), dom);
  auto io = build_iota(cert, q, p, l, beta, level);
  CHECK(io.r == std::vector<BigInt>{10, 6});
  CHECK(io.equivariant);
  for (std::size_t i = 0; i < dom.size(); ++i)
    CHECK(io.target.point(io.map.assign[i]) == iota_point(dom.point(i)[0], q, io.r));

  // proof constants: forward m+1, backward 2m+1
  DistortionOptions o;
  o.fixed_C = Rational(5);
  auto rep = measure_distortion(io.map, o);
  CHECK(rep.A <= 2);

  auto m1 = verify_technical_conditions(BigInt(5), {BigInt(3)}, {{Rational(3, 5), Rational(3, 5)}}, 5, 1);
  FiniteNet d5 = circle_net(5);
  auto b5 = rotations(GroupSpec::free_abelian(1), d5, {Rational(3, 5)});
  auto io5 = build_iota(m1, BigInt(5), {BigInt(3)}, 5, b5, warped_closed_form_level(b5, 25, d5));
  CHECK(io5.r == std::vector<BigInt>{2});

  TechnicalReport bad = cert;
  bad.ok = false;
  CHECK_THROWS_AS(build_iota(bad, q, p, l, beta, level), ValidationError);
  CHECK_THROWS_AS(build_iota(cert, q, p, l, beta, warped_closed_form_level(beta, 7, dom)), ValidationError);
}

TEST_CASE("angle substitution") {
  const Rational t = 25;
  FiniteNet dom = circle_net(50);
  auto g = golden_cf(64);
  const Rational a = g.truncation();
  auto sa = rotations(GroupSpec::free_abelian(1), dom, {a});
  auto alpha_level = warped_closed_form_level(sa, t, dom);

  auto exact = rotations(GroupSpec::free_abelian(1), dom, {Rational(3, 5)});
  auto same = substitute_angle(warped_closed_form_level(exact, t, dom), warped_closed_form_level(exact, t, dom),
                               {{Rational(3, 5), Rational(3, 5)}}, {BigInt(3)}, BigInt(5), 5, 1);
  CHECK(same.report.C == 1);
  CHECK(same.report.A == 0);

  auto sub = substitute_angle(alpha_level, warped_closed_form_level(exact, t, dom), {g.value_interval()},
                              {BigInt(3)}, BigInt(5), 5, 1);
  CHECK(sub.K_certified);
  CHECK(sub.C0 <= 2);
  CHECK(sub.within_bound);
  CHECK_FALSE(sub.flagged);

  auto half = rotations(GroupSpec::free_abelian(1), dom, {Rational(1, 2)});
  auto bad = substitute_angle(alpha_level, warped_closed_form_level(half, t, dom), {g.value_interval()},
                              {BigInt(1)}, BigInt(2), Rational(25, 2), 1);
  CHECK_FALSE(bad.K_certified);
  CHECK(bad.flagged);

  CHECK_THROWS_AS(substitute_angle(alpha_level, warped_closed_form_level(exact, 10, dom), {g.value_interval()},
                                   {BigInt(3)}, BigInt(5), 5, 1),
                  DomainMismatchError);
}

TEST_CASE("quotient by a finite factor") {
  FiniteNet dom = circle_net(10);
  auto sys = rotations(GroupSpec::abelian_product({0, 2}), dom, {Rational(1, 5), Rational(1, 2)});
  for (long t : {1L, 4L, 13L}) {
    auto q = quotient_map(sys, 1, Rational(t), dom);
    CHECK(q.ok);
    CHECK(q.report.C == 1);
    CHECK(q.orbit_diameter <= 1);
    CHECK(q.report.A <= q.orbit_diameter);
    CHECK(q.quotient.size() == 5);
    // 1-Lipschitz and additive defect, checked pair by pair
    Rational A = 0;
    for (std::size_t i = 0; i < dom.size(); ++i)
      for (std::size_t j = 0; j < dom.size(); ++j) {
        const Rational s = q.map.source->distance(i, j);
        const Rational u = q.map.target->distance(q.class_of[i], q.class_of[j]);
        CHECK(u <= s);
        A = std::max(A, Rational(s - u));
      }
    CHECK(A == q.report.A);
  }

  auto z3 = rotations(GroupSpec::finite_abelian_product({3, 5}), circle_net(15), {Rational(1, 3), Rational(1, 5)});
  auto q3 = quotient_map(z3, 0, 6, circle_net(15));
  CHECK(q3.ok);
  CHECK(q3.report.C == 1);

  auto triv = rotations(GroupSpec::abelian_product({0, 1}), dom, {Rational(1, 5)});
  auto qt = quotient_map(triv, 1, 3, dom);
  CHECK(qt.report.A == 0);
  CHECK(qt.quotient.size() == dom.size());

  // a swap that is not an isometry
  FiniteNet m = FiniteNet::explicit_matrix({"a", "b", "c"}, {0, 1, 2, 1, 0, 1, 2, 1, 0});
  ActionSystem swap(GroupSpec::finite_cyclic(2), m, {GeneratorMap::permutation({1, 0, 2})});
  CHECK_THROWS_AS(quotient_map(swap, 0, 1, m), UnsupportedError);
}

TEST_CASE("cocycles") {
  FiniteNet dom = circle_net(7);
  auto a = rotations(GroupSpec::free_abelian(1), dom, {Rational(2, 7)});
  std::vector<std::size_t> id(dom.size());
  for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
  auto c = extract_cocycle(a, dom, a, dom, id, 3, 3);
  for (std::size_t g = 0; g < c.gammas.size(); ++g)
    for (std::size_t y = 0; y < c.n; ++y) CHECK(c.at(g, y) == c.gammas[g]);
  REQUIRE(c.homomorphism);
  CHECK(*c.homomorphism == c.gammas);
  CHECK(c.identity_holds);
  CHECK(c.kernel.size() == 1);

  // doubling into the doubled angle
  auto b = rotations(GroupSpec::free_abelian(1), dom, {Rational(4, 7)});
  std::vector<std::size_t> dbl;
  for (std::size_t i = 0; i < dom.size(); ++i) dbl.push_back(*dom.index_of({mod1(2 * dom.point(i)[0])}));
  auto d = extract_cocycle(a, dom, b, dom, dbl, 3, 3);
  CHECK(d.homomorphism);
  for (std::size_t g = 0; g < d.gammas.size(); ++g) CHECK(d.at(g, 0) == d.gammas[g]);

  // quotient by Z/2: kernel of size two
  FiniteNet ten = circle_net(10);
  auto sys = rotations(GroupSpec::abelian_product({0, 2}), ten, {Rational(1, 5), Rational(1, 2)});
  auto q = quotient_map(sys, 1, 2, ten);
  auto k = extract_cocycle(sys, ten, *q.target_system, q.quotient, q.class_of, 2, 2);
  CHECK(k.identity_holds);
  REQUIRE(k.homomorphism);
  CHECK(k.kernel.size() == 2);
  CHECK_THROWS_AS(extract_cocycle(sys, ten, *q.target_system, q.quotient, q.class_of, 2, 5), DegenerateActionError);

  // random triples
  std::mt19937 rng(3);
  for (int s = 0; s < 200; ++s) {
    std::size_t g1, g2;
    Word prod;
    do {
      g1 = rng() % k.gammas.size();
      g2 = rng() % k.gammas.size();
      prod = multiply(k.gammas[g2], k.gammas[g1], sys.group());
    } while (std::find(k.gammas.begin(), k.gammas.end(), prod) == k.gammas.end());
    CHECK(cocycle_identity_holds(k, sys, ten, g1, g2, rng() % ten.size()));
  }

  std::vector<std::size_t> scramble(id);
  std::swap(scramble[1], scramble[2]);
  auto c7 = rotations(GroupSpec::free_abelian(1), dom, {Rational(1, 7)});
  CHECK_THROWS_AS(extract_cocycle(c7, dom, c7, dom, scramble, 1, 1), OrbitPreservationError);

  std::ostringstream csv;
  write_cocycle_csv(c, dom, csv);
  CHECK(csv.str().rfind("gamma,y,delta\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : csv.str()) lines += ch == '\n';
  CHECK(lines == 1 + c.gammas.size() * c.n);
}

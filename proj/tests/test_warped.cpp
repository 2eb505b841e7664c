#include <cstdio>
#include <sstream>

#include "doctest.h"
#include "warpcone/actions.hpp"
#include "warpcone/errors.hpp"
#include "warpcone/warped.hpp"

using namespace warpcone;

namespace {

ActionSystem rotation_system(const Rational& alpha, const FiniteNet& space) {
  ActionSystem sys(GroupSpec::free_abelian(1), space, {GeneratorMap::rotation({alpha})});
  sys.verify_isometric(space);
  return sys;
}

ActionSystem dihedral_system(const Rational& c1, const Rational& c2, const FiniteNet& space) {
  ActionSystem sys(GroupSpec::infinite_dihedral(), space,
                   {GeneratorMap::reflection({c1}), GeneratorMap::reflection({c2})});
  sys.verify_isometric(space);
  return sys;
}

// Floyd-Warshall over t d edges plus unit generator edges; independent of the library kernels.
std::vector<Rational> floyd(const ActionSystem& sys, const Rational& t, const FiniteNet& dom) {
  const std::size_t n = dom.size();
  std::vector<Rational> d(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = t * dom.distance(i, j);
  for (std::size_t g = 0; g < sys.group().generators().size(); ++g)
    for (std::size_t i = 0; i < n; ++i) {
      auto j = *dom.index_of(sys.apply_generator(g, dom.point(i)));
      if (d[i * n + j] > 1) d[i * n + j] = 1;
    }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i * n + k] + d[k * n + j] < d[i * n + j]) d[i * n + j] = d[i * n + k] + d[k * n + j];
  return d;
}

void expect_equal_tables(const WarpedLevel& lv, const std::vector<Rational>& ref) {
  const std::size_t n = lv.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) REQUIRE(lv.distance(i, j) == ref[i * n + j]);
}

}  // namespace

TEST_CASE("closed form matches brute-force shortest paths on rotation orbits") {
  for (auto alpha : {Rational(1, 3), Rational(2, 5), Rational(3, 7)}) {
    const auto q = static_cast<std::int64_t>(denom(alpha));
    FiniteNet dom = circle_net(4 * q);
    auto sys = rotation_system(alpha, dom);
    for (long t : {1L, 3L, 7L, 20L}) {
      auto ref = floyd(sys, Rational(t), dom);
      expect_equal_tables(warped_closed_form_level(sys, Rational(t), dom), ref);
      expect_equal_tables(warped_distance_graph(sys, Rational(t), dom), ref);
      expect_equal_tables(infimum_level(sys, Rational(t), dom), ref);
    }
  }
}

TEST_CASE("dihedral closed form matches brute force") {
  FiniteNet dom = circle_net(14);
  auto sys = dihedral_system(Rational(0), Rational(2, 7), dom);
  for (long t : {1L, 5L, 12L}) {
    auto ref = floyd(sys, Rational(t), dom);
    expect_equal_tables(warped_closed_form_level(sys, Rational(t), dom), ref);
    expect_equal_tables(warped_distance_graph(sys, Rational(t), dom), ref);
  }
}

TEST_CASE("row and pair kernels agree, serial and parallel") {
  FiniteNet dom = circle_net(30);
  auto sys = rotation_system(Rational(7, 30), dom);
  auto a = warped_closed_form_level(sys, Rational(9), dom);
  auto b = warped_closed_form_level(sys, Rational(9), dom);
  a.materialize(Exec::Serial);
  for (std::size_t i = 0; i < dom.size(); ++i)
    for (std::size_t j = 0; j < dom.size(); ++j) CHECK(a.num(i, j) == b.num(i, j));
  b.materialize(Exec::Parallel);
  CHECK(a.table() == b.table());
}

TEST_CASE("closed form on a domain that is not invariant uses ambient images") {
  // points of a fine net, rotation by a coarse-denominator angle far from the net
  FiniteNet dom = circle_net(10);
  FiniteNet amb = circle_net(10);
  ActionSystem sys(GroupSpec::free_abelian(1), amb, {GeneratorMap::rotation({Rational(1, 13)})});
  sys.verify_isometric(amb);
  auto lv = warped_closed_form_level(sys, Rational(6), dom);
  for (std::size_t i = 0; i < dom.size(); ++i)
    for (std::size_t j = 0; j < dom.size(); ++j)
      CHECK(lv.distance(i, j) ==
            warped_distance_closed_form(sys, Rational(6), dom.point(i), dom.point(j)));
}

TEST_CASE("graph reference and fixed-point graph agree") {
  FiniteNet dom = circle_net(12);
  auto sys = rotation_system(Rational(1, 4), dom);
  auto ref = graph_reference(sys, Rational(5, 2), dom);
  expect_equal_tables(warped_distance_graph(sys, Rational(5, 2), dom, std::nullopt, Exec::Serial), ref);
}

TEST_CASE("graph method reports closure trouble through R_path") {
  FiniteNet dom = circle_net(12);
  auto sys = rotation_system(Rational(1, 12), dom);
  // distance 0 -> 1/2 at t = 100 needs 6 jumps
  CHECK_THROWS_AS(warped_distance_graph(sys, Rational(100), dom, 3), ClosureError);
  auto lv = warped_distance_graph(sys, Rational(100), dom, 6);
  CHECK(lv.max_jumps() == 6);
}

TEST_CASE("closed form rejects unverified systems and escaping orbits") {
  FiniteNet dom = circle_net(6);
  ActionSystem raw(GroupSpec::free_abelian(1), dom, {GeneratorMap::rotation({Rational(1, 6)})});
  CHECK_THROWS_AS(warped_closed_form_level(raw, Rational(2), dom), ValidationError);
  raw.verify_isometric(dom);
  FiniteNet small = circle_net(2);
  CHECK_THROWS_AS(warped_distance_closed_form(raw, Rational(10), Point{Rational(0)},
                                              Point{Rational(1, 2)}, &small),
                  ClosureError);
}

TEST_CASE("orbit nets reproduce the closed form") {
  FiniteNet circ = circle_net(1);
  ActionSystem sys(GroupSpec::free_abelian(2), circ,
                   {GeneratorMap::rotation({Rational(13, 89)}), GeneratorMap::rotation({Rational(21, 55)})});
  sys.verify_isometric(circ);
  const Rational t(300);
  std::vector<Point> seeds{{Rational(0)}, {Rational(1, 1000)}, {Rational(7, 600)}};
  auto lv = orbit_net_level(sys, t, seeds, 3);
  CHECK(lv.size() == 3 * 25);
  for (std::size_t i = 0; i < lv.size(); i += 3)
    for (std::size_t j = 0; j < lv.size(); j += 2)
      REQUIRE(lv.distance(i, j) == warped_distance_closed_form(sys, t, lv.domain().point(i),
                                                                lv.domain().point(j)));
}

TEST_CASE("faithfulness radius for a rational rotation is small") {
  const Rational alpha(1, 3);
  FiniteNet dom = circle_net(30);
  auto sys = rotation_system(alpha, dom);
  for (long t : {10L, 100L, 1000L}) {
    auto lv = warped_closed_form_level(sys, Rational(t), dom);
    auto cov = covering_level(sys, Rational(t), dom, 3);
    auto rep = faithfulness_radius(cov, lv, 3);
    CHECK(rep.radius < 2);
    REQUIRE(rep.witness_a.has_value());
    const CoveringPoint a{Word{{2}}, 0}, b{Word{{-1}}, 0};
    CHECK(is_faithfulness_violation(cov, lv, a, b));
  }
}

TEST_CASE("faithfulness radius for a Fibonacci approximant matches brute force") {
  const Rational alpha(34, 55);
  FiniteNet dom = circle_net(55);
  auto sys = rotation_system(alpha, dom);
  auto lv = warped_closed_form_level(sys, Rational(55), dom);
  auto cov = covering_level(sys, Rational(55), dom, 4);
  auto rep = faithfulness_radius(cov, lv, 4, Exec::Serial);
  auto rep2 = faithfulness_radius(cov, lv, 4, Exec::Parallel);
  CHECK(rep.radius == rep2.radius);
  // brute force over the ball: first violation (-3,0),(0,3/55) at level 3
  CHECK(rep.radius == 2);
  CHECK(rep.violation_level == 3);
}

TEST_CASE("faithfulness checks arguments") {
  FiniteNet dom = circle_net(6);
  auto sys = rotation_system(Rational(1, 6), dom);
  auto lv = warped_closed_form_level(sys, Rational(2), dom);
  auto cov = covering_level(sys, Rational(3), dom, 2);
  CHECK_THROWS_AS(faithfulness_radius(cov, lv, 2), DomainMismatchError);
  auto cov2 = covering_level(sys, Rational(2), dom, 2);
  CHECK_THROWS_AS(faithfulness_radius(cov2, lv, 3), ClosureError);
  ActionSystem raw(GroupSpec::free_abelian(1), dom, {GeneratorMap::rotation({Rational(1, 6)})});
  CHECK_THROWS_AS(covering_level(raw, Rational(2), dom, 2), UnsupportedError);
}

TEST_CASE("covering distance d1 and projection") {
  FiniteNet dom = circle_net(6);
  auto sys = rotation_system(Rational(1, 6), dom);
  CoveringLevel cov(sys, Rational(2), dom, 2);
  CHECK(cov.size() == 5 * 6);
  const CoveringPoint a{Word{{1}}, 0}, b{Word{{-1}}, 3};
  CHECK(cov.d1(a, b) == Rational(2) + Rational(2) * Rational(1, 2));
  CHECK(cov.project(a) == 1);
  auto tab = cov.d1_table();
  for (std::size_t i = 0; i < cov.size(); ++i) CHECK(tab[i * cov.size() + i] == 0);
}

TEST_CASE("stabilized distance") {
  FiniteNet sp = circle_net(1);
  ActionSystem sys(GroupSpec::free_abelian(1), sp, {GeneratorMap::rotation({Rational(1, 3)})});
  CHECK(stabilized_distance(sys, {Rational(0)}, {Rational(2, 3)}) == 1u);
  CHECK_FALSE(stabilized_distance(sys, {Rational(0)}, {Rational(1, 2)}).has_value());
  ActionSystem s2(GroupSpec::free_abelian(1), sp, {GeneratorMap::rotation({Rational(1, 10)})});
  CHECK(stabilized_distance(s2, {Rational(0)}, {Rational(3, 10)}) == 3u);
}

TEST_CASE("power bound decisions") {
  CHECK(power_bound_holds(Rational(3), Rational(2), Rational(2)));
  CHECK_FALSE(power_bound_holds(Rational(5), Rational(2), Rational(2)));
  CHECK(power_bound_holds(Rational(2), Rational(4), Rational(1, 2)));
  CHECK_FALSE(power_bound_holds(Rational(21, 10), Rational(4), Rational(1, 2)));
  CHECK(power_bound_holds(Rational(1, 2), Rational(2), Rational(0)));
}

TEST_CASE("cache round trip and CSV") {
  FiniteNet dom = circle_net(8);
  auto sys = rotation_system(Rational(3, 8), dom);
  auto lv = warped_closed_form_level(sys, Rational(5), dom);
  const auto key = level_hash(sys, Rational(5), dom);
  const std::string path = "warped_cache_test.bin";
  save_level_cache(lv, key, path);
  auto back = load_level_cache(path, key);
  REQUIRE(back.has_value());
  CHECK(back->second == lv.den());
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) CHECK(back->first[i * 8 + j] == lv.num(i, j));
  CHECK_FALSE(load_level_cache(path, key + 1).has_value());
  std::ostringstream csv;
  write_level_csv(lv, csv);
  std::istringstream in(csv.str());
  auto net = load_matrix_csv(in);
  CHECK(net.size() == 8);
  CHECK(net.distance(0, 3) == lv.distance(0, 3));
  std::remove(path.c_str());
}

TEST_CASE("warped distances satisfy the metric axioms and the warping bounds") {
  FiniteNet dom = circle_net(20);
  auto sys = rotation_system(Rational(3, 10), dom);
  auto lv = warped_closed_form_level(sys, Rational(7), dom);
  CHECK(check_metric(lv).ok);
  for (std::size_t i = 0; i < dom.size(); ++i) {
    auto gi = *dom.index_of(sys.apply_generator(0, dom.point(i)));
    CHECK(lv.distance(i, gi) <= 1);
    for (std::size_t j = 0; j < dom.size(); ++j) CHECK(lv.distance(i, j) <= Rational(7) * dom.distance(i, j));
  }
}

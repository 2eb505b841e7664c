#include <random>

#include "doctest.h"
#include "warpcone/actions.hpp"
#include "warpcone/errors.hpp"

using namespace warpcone;

namespace {

ActionSystem rotation_system(const Rational& alpha, const FiniteNet& space) {
  return ActionSystem(GroupSpec::free_abelian(1), space, {GeneratorMap::rotation({alpha})});
}

Rational frac(const Rational& x) { return x - Rational(floor(x)); }

}  // namespace

TEST_CASE("rotation and dihedral examples") {
  auto c4 = circle_net(4);
  auto rot = rotation_system(Rational(1, 4), c4);
  CHECK(rot.apply(Word{{2}}, {0}) == Point{Rational(1, 2)});
  CHECK(rot.apply(Word{{-1}}, {0}) == Point{Rational(3, 4)});

  const Rational alpha(2, 7);
  auto D = GroupSpec::infinite_dihedral();
  ActionSystem dih(D, circle_net(7),
                   {GeneratorMap::reflection({Rational(0)}), GeneratorMap::reflection({alpha})});
  const Word r = D.generators()[D.generator_index("r")].element;
  const Word rp = D.generators()[D.generator_index("r'")].element;
  for (const auto& p : dih.space().points()) {
    CHECK(dih.apply(r, p) == Point{frac(-p[0])});
    CHECK(dih.apply(multiply(rp, r, D), p) == Point{frac(p[0] + alpha)});
  }

  auto E = GroupSpec::infinite_dihedral(DihedralMarking::RotationReflection);
  ActionSystem dih2(E, circle_net(7), {GeneratorMap::rotation({alpha}), GeneratorMap::reflection({Rational(0)})});
  CHECK(dih2.apply(E.generators()[E.generator_index("r")].element, {Rational(1, 7)}) == Point{Rational(6, 7)});

  CHECK_THROWS_AS(ActionSystem(GroupSpec::free_abelian(1), c4, {}), ValidationError);
  CHECK_THROWS_AS(ActionSystem(GroupSpec::finite_cyclic(3), c4, {GeneratorMap::rotation({Rational(1, 4)})}),
                  ValidationError);
}

TEST_CASE("actions respect the group law") {
  std::mt19937 rng(3);
  auto torus = torus_product({{circle_net(6), 1}, {circle_net(10), 2}});
  std::vector<ActionSystem> systems{
      ActionSystem(GroupSpec::free_abelian(2), torus,
                   {GeneratorMap::rotation({Rational(1, 6), 0}), GeneratorMap::rotation({0, Rational(3, 10)})}),
      ActionSystem(GroupSpec::infinite_dihedral(), circle_net(11),
                   {GeneratorMap::reflection({Rational(0)}), GeneratorMap::reflection({Rational(3, 11)})}),
      ActionSystem(GroupSpec::infinite_dihedral(DihedralMarking::RotationReflection), circle_net(9),
                   {GeneratorMap::rotation({Rational(2, 9)}), GeneratorMap::reflection({Rational(1, 9)})}),
      ActionSystem(GroupSpec::finite_abelian_product({2, 4}),
                   ultrametric_chain({2, 4}, {Rational(1, 3), Rational(1, 9)}),
                   {GeneratorMap::translation({1, 0}), GeneratorMap::translation({0, 1})}),
  };
  for (const auto& sys : systems) {
    auto b = ball(sys.group(), 4);
    const auto& pts = sys.space().points();
    for (int k = 0; k < 200; ++k) {
      const Word& g = b[rng() % b.size()];
      const Word& h = b[rng() % b.size()];
      const Point& x = pts[rng() % pts.size()];
      CHECK(sys.apply(multiply(g, h, sys.group()), x) == sys.apply(g, sys.apply(h, x)));
      CHECK(sys.apply(sys.group().identity(), x) == x);
      // the spelling walked in a closed domain lands on the same point
      auto i = sys.apply_in(g, *sys.space().index_of(x), sys.space());
      CHECK(sys.space().point(i) == sys.apply(g, x));
      CHECK(sys.spelling(g).size() == word_length(g, sys.group()));
    }
  }
}

TEST_CASE("isometric and lipschitz checks") {
  auto rot = rotation_system(Rational(1, 10), circle_net(10));
  CHECK(rot.verify_isometric(rot.space()));
  CHECK(rot.isometric() == true);
  auto big = rot.scaled(25);
  CHECK(big.isometric() == true);
  CHECK(big.space().diameter() == Rational(25, 2));

  // conjugate of the 1/60 rotation by h with slopes 2/3 and 4/3
  const std::vector<std::pair<Rational, Rational>> breaks{{Rational(1, 2), Rational(1, 3)}};
  std::vector<Rational> pts;
  const std::vector<std::pair<Rational, Rational>> full{{0, 0}, breaks[0], {1, 1}};
  for (long k = 0; k < 60; ++k) pts.push_back(pl_eval(full, Rational(k, 60)));
  auto dom = FiniteNet::circle(pts);
  ActionSystem pl(GroupSpec::free_abelian(1), dom, {GeneratorMap::pl_conjugate(Rational(1, 60), breaks)});
  CHECK_FALSE(pl.verify_isometric(dom));
  const Rational L = pl.verify_lipschitz(dom);
  CHECK(L > 1);
  CHECK(L <= 2);
  for (const auto& x : pts) CHECK(pl_eval(full, pl_inverse(full, x)) == x);
  CHECK(pl_eval(full, Rational(3, 4)) == Rational(2, 3));
}

TEST_CASE("orbit closure") {
  auto third = rotation_system(Rational(1, 3), circle_net(1));
  CHECK(orbit_closure(third, {{Rational(0)}}, 5).size() == 3);
  auto slow = rotation_system(Rational(1, 97), circle_net(1));
  auto o = orbit_closure(slow, {{Rational(0)}}, 5);
  CHECK(o.size() == 11);
  CHECK(o.index_of({Rational(92, 97)}));
  CHECK_FALSE(o.index_of({Rational(6, 97)}));
  CHECK_THROWS_AS(orbit_closure(slow, {{Rational(0)}}, 200, 50), CapacityError);
}

TEST_CASE("freeness at a scale") {
  auto third = rotation_system(Rational(1, 3), circle_net(3));
  auto v = check_free_at_scale(third, 3, third.space());
  CHECK(v.size() == 6);
  CHECK(v.front().word == Word{{-3}});
  auto slow = rotation_system(Rational(1, 97), circle_net(97));
  CHECK(check_free_at_scale(slow, 10, slow.space()).empty());

  ActionSystem flip(GroupSpec::finite_cyclic(2), circle_net(4), {GeneratorMap::reflection({Rational(0)})});
  auto f = check_free_at_scale(flip, 1, flip.space());
  REQUIRE(f.size() == 2);
  CHECK(f[0].point == Point{Rational(0)});
  CHECK(f[1].point == Point{Rational(1, 2)});
}

TEST_CASE("change of metric") {
  auto rot = rotation_system(Rational(1, 30), circle_net(30));
  auto mc = change_of_metric(rot, rot.space());
  for (std::size_t k = 0; k + 1 < mc.breakpoints.size(); ++k)
    CHECK(mc.breakpoints[k + 1] == mc.breakpoints[k] / 3);
  CHECK(mc.breakpoints.back() < rot.space().min_positive_distance());
  CHECK(mc.max_generator_ratio == 1);
  CHECK(mc.concave_increasing);
  CHECK(check_metric(mc.net).ok);

  const std::vector<std::pair<Rational, Rational>> breaks{{Rational(1, 2), Rational(1, 3)}};
  std::vector<Rational> pts;
  const std::vector<std::pair<Rational, Rational>> full{{0, 0}, breaks[0], {1, 1}};
  for (long k = 0; k < 60; ++k) pts.push_back(pl_eval(full, Rational(k, 60)));
  auto dom = FiniteNet::circle(pts);
  ActionSystem pl(GroupSpec::free_abelian(1), dom, {GeneratorMap::pl_conjugate(Rational(1, 60), breaks)});
  auto pc = change_of_metric(pl, dom);
  CHECK(pc.max_generator_ratio <= 4);
  CHECK(pc.concave_increasing);
  // independent check of the ratio on the new metric
  Rational worst = 0;
  for (std::size_t i = 0; i < dom.size(); ++i)
    for (std::size_t j = i + 1; j < dom.size(); ++j) {
      auto si = *dom.index_of(pl.apply(Word{{1}}, dom.point(i)));
      auto sj = *dom.index_of(pl.apply(Word{{1}}, dom.point(j)));
      worst = std::max(worst, Rational(pc.net.distance(si, sj) / pc.net.distance(i, j)));
      CHECK(pc.net.distance(i, j) == pc.eval(dom.distance(i, j)));
    }
  CHECK(worst == pc.max_generator_ratio);

  auto two = FiniteNet::explicit_matrix({"a", "b"}, {0, 1, 1, 0});
  ActionSystem swap(GroupSpec::finite_cyclic(2), two, {GeneratorMap::permutation({1, 0})});
  auto sc = change_of_metric(swap, two);
  CHECK(sc.breakpoints == std::vector<Rational>{1, Rational(1, 3)});
  CHECK(sc.max_generator_ratio == 1);

  auto open = circle_net(4, {Rational(1, 8)});
  auto q = rotation_system(Rational(1, 4), circle_net(4));
  CHECK_THROWS_AS(change_of_metric(q, open), ClosureError);
}

TEST_CASE("json round trip") {
  ActionSystem sys(GroupSpec::infinite_dihedral(), circle_net(5, {Rational(1, 10)}),
                   {GeneratorMap::reflection({Rational(0)}), GeneratorMap::reflection({Rational(1, 5)})});
  auto back = action_from_json(to_json(sys));
  CHECK(back.group() == sys.group());
  CHECK(back.space().points() == sys.space().points());
  for (const auto& w : ball(sys.group(), 3))
    for (const auto& p : sys.space().points()) CHECK(back.apply(w, p) == sys.apply(w, p));
  for (const auto& net : {circle_net(3), torus_product({{circle_net(2), 3}, {circle_net(3), 1}}),
                          ultrametric_chain({2, 4}, {Rational(1), Rational(1, 2)})}) {
    auto n = net_from_json(to_json(net));
    CHECK(n.points() == net.points());
    for (std::size_t i = 0; i < n.size(); ++i) CHECK(n.distance(0, i) == net.distance(0, i));
  }
  CHECK_THROWS(action_from_json(nlohmann::json::object()));
}

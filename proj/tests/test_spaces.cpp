#include <random>
#include <sstream>

#include "doctest.h"
#include "warpcone/errors.hpp"
#include "warpcone/spaces.hpp"

using namespace warpcone;

namespace {

std::size_t idx(const FiniteNet& n, Point p) { return *n.index_of(p); }

Rational arc(const Rational& a, const Rational& b) {
  Rational d = abs(a - b);
  return std::min(d, Rational(1 - d));
}

}  // namespace

TEST_CASE("circle nets") {
  auto c4 = circle_net(4);
  CHECK(c4.size() == 4);
  CHECK(c4.distance(idx(c4, {0}), idx(c4, {Rational(3, 4)})) == Rational(1, 4));
  auto c1 = circle_net(1, {Rational(1, 3)});
  CHECK(c1.size() == 2);
  CHECK(c1.distance(0, 1) == Rational(1, 3));
  auto c10 = circle_net(10);
  CHECK(c10.distance(idx(c10, {Rational(1, 10)}), idx(c10, {Rational(9, 10)})) == Rational(1, 5));
  CHECK(circle_net(4, {Rational(1, 2)}).size() == 4);
  CHECK_THROWS_AS(circle_net(0), ValidationError);
  CHECK_THROWS_AS(circle_net(4, {Rational(3, 2)}), ValidationError);
  CHECK_THROWS_AS(parse_circle_coordinate("2/4"), ValidationError);
  CHECK(parse_circle_coordinate("1/4") == Rational(1, 4));

  auto c = circle_net(13, {Rational(1, 7), Rational(2, 9)});
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) CHECK(c.distance(i, j) == arc(c.point(i)[0], c.point(j)[0]));
  CHECK(check_metric(c).ok);
}

TEST_CASE("scaling") {
  auto s = scale(circle_net(4), 8);
  CHECK(s.distance(idx(s, {0}), idx(s, {Rational(1, 4)})) == 2);
  auto base = circle_net(9, {Rational(1, 5)});
  auto one = scale(base, 1);
  auto a = scale(scale(base, Rational(2, 3)), 7);
  auto b = scale(base, Rational(14, 3));
  for (std::size_t i = 0; i < base.size(); ++i)
    for (std::size_t j = 0; j < base.size(); ++j) {
      CHECK(one.distance(i, j) == base.distance(i, j));
      CHECK(a.distance(i, j) == b.distance(i, j));
    }
  auto u = scale(ultrametric_chain({2, 4}, {Rational(1, 3), Rational(1, 9)}), 9);
  CHECK(u.weights() == std::vector<Rational>{3, 1});
  CHECK_THROWS_AS(scale(base, 0), ValidationError);
}

TEST_CASE("torus products") {
  auto t = torus_product({{circle_net(2), 1}, {circle_net(2), 1}});
  CHECK(t.distance(idx(t, {0, 0}), idx(t, {Rational(1, 2), Rational(1, 2)})) == 1);
  auto f = torus_product({{circle_net(5), 5}, {circle_net(5), 5}});
  CHECK(f.distance(idx(f, {0, 0}), idx(f, {Rational(1, 5), 0})) == 1);
  auto d = torus_product({{circle_net(2), 3}, {circle_net(2), 9}});
  CHECK(d.diameter() == 6);
  auto mixed = torus_product({{circle_net(3), 2}, {circle_net(4), 5}});
  auto inf = torus_product({{circle_net(3), 2}, {circle_net(4), 5}}, TorusNorm::LInf);
  for (std::size_t i = 0; i < mixed.size(); ++i)
    for (std::size_t j = 0; j < mixed.size(); ++j) {
      const auto& p = mixed.point(i);
      const auto& q = mixed.point(j);
      const Rational a = 2 * arc(p[0], q[0]), b = 5 * arc(p[1], q[1]);
      CHECK(mixed.distance(i, j) == a + b);
      CHECK(inf.distance(idx(inf, p), idx(inf, q)) == std::max(a, b));
    }
  CHECK(check_metric(mixed).ok);
  CHECK_THROWS(torus_product({}));
}

TEST_CASE("ultrametric chains") {
  auto u = ultrametric_chain({2, 4}, {Rational(1, 3), Rational(1, 9)});
  CHECK(u.size() == 8);
  CHECK(u.distance(idx(u, {0, 0}), idx(u, {1, 0})) == Rational(1, 3));
  CHECK(u.distance(idx(u, {0, 1}), idx(u, {0, 3})) == Rational(1, 9));
  CHECK(check_strong_triangle(u).ok);
  auto deep = ultrametric_chain({2, 3, 2}, {Rational(1), Rational(1, 2), Rational(1, 5)});
  CHECK(check_strong_triangle(deep).ok);
  CHECK(check_metric(deep).ok);
  CHECK_THROWS_AS(ultrametric_chain({2, 2}, {Rational(1, 9), Rational(1, 3)}), ValidationError);
  CHECK_THROWS_AS(ultrametric_chain({2}, {Rational(1), Rational(1, 2)}), ValidationError);
}

TEST_CASE("quotients by finite groups") {
  auto c4 = circle_net(4);
  auto q = quotient_by_finite_group(c4, {{idx(c4, {0}), idx(c4, {Rational(1, 2)})},
                                         {idx(c4, {Rational(1, 4)}), idx(c4, {Rational(3, 4)})}});
  CHECK(q.size() == 2);
  CHECK(q.distance(0, 1) == Rational(1, 4));

  std::vector<std::vector<std::size_t>> single;
  for (std::size_t i = 0; i < c4.size(); ++i) single.push_back({i});
  auto id = quotient_by_finite_group(c4, single);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(id.distance(i, j) == c4.distance(i, j));

  auto c6 = circle_net(6);
  auto z3 = quotient_by_finite_group(c6, {{0, 2, 4}, {1, 3, 5}});
  CHECK(z3.size() == 2);
  CHECK(z3.distance(0, 1) == Rational(1, 6));
  auto net = z3.as_net();
  CHECK(net.kind() == NetKind::ExplicitMatrix);
  CHECK(net.distance(0, 1) == Rational(1, 6));
  CHECK(z3.fixed());

  // min over representatives against a direct scan
  auto c12 = circle_net(12);
  std::vector<std::vector<std::size_t>> orbits;
  for (std::size_t i = 0; i < 4; ++i) orbits.push_back({i, i + 4, i + 8});
  auto qz = quotient_by_finite_group(c12, orbits);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      Rational best = 1;
      for (auto x : orbits[a])
        for (auto y : orbits[b]) best = std::min(best, c12.distance(x, y));
      CHECK(qz.distance(a, b) == best);
    }
  CHECK(check_metric(qz).ok);
  // a partition that is not a group orbit breaks the triangle inequality
  auto c8 = circle_net(8);
  CHECK_THROWS_AS(quotient_by_finite_group(c8, {{0, 3}, {1}, {2}, {4}, {5}, {6}, {7}}), MetricError);
}

TEST_CASE("interleaved embeddings") {
  auto same = interleaved_embedding({2, 4}, {2, 4});
  CHECK(verify_interleaved(same));
  auto wide = interleaved_embedding({2, 4}, {3, 9});
  CHECK(verify_interleaved(wide));
  CHECK(wide.maps[1].size() == 4);
  CHECK(embedding_is_isometric(wide, {Rational(1, 3), Rational(1, 9)}));
  CHECK_THROWS_AS(interleaved_embedding({4, 8}, {2, 4}), InfeasibleError);
}

TEST_CASE("explicit matrices and csv") {
  auto m = FiniteNet::explicit_matrix({"a", "b", "c"}, {0, 1, 2, 1, 0, 1, 2, 1, 0});
  std::ostringstream out;
  save_matrix_csv(m, out);
  std::istringstream in(out.str());
  auto back = load_matrix_csv(in);
  CHECK(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(back.distance(i, j) == m.distance(i, j));
  CHECK(back.label(2) == "c");
  auto sub = m.with_points({{2}, {0}});
  CHECK(sub.distance(*sub.index_of({0}), *sub.index_of({2})) == 2);
  CHECK_THROWS(FiniteNet::explicit_matrix({"a", "b"}, {0, 1, 2, 0}));
  std::istringstream bad("a,b\n0,1\n");
  CHECK_THROWS(load_matrix_csv(bad));
}

TEST_CASE("random nets satisfy the metric axioms") {
  std::mt19937 rng(4);
  for (int k = 0; k < 10; ++k) {
    std::vector<Rational> extra;
    for (int e = 0; e < 5; ++e) extra.emplace_back(static_cast<long>(rng() % 37), 37);
    auto c = circle_net(1 + static_cast<std::int64_t>(rng() % 20), extra);
    CHECK(check_metric(c).ok);
    auto t = torus_product({{c, Rational(1 + rng() % 5)}, {circle_net(5), Rational(2)}});
    CHECK(check_metric(t, 100, 2000).ok);
  }
}

TEST_CASE("lazy rows are shared across threads") {
  auto t = torus_product({{circle_net(20), 3}, {circle_net(15), 7}});
  std::vector<Rational> sums(t.size());
#pragma omp parallel for
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(t.size()); ++i) {
    Rational s = 0;
    for (const auto& d : t.row(static_cast<std::size_t>(i))) s += d;
    sums[static_cast<std::size_t>(i)] = s;
  }
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(sums[i] == sums[0]);
}

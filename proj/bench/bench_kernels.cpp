// Serial vs OpenMP kernels. Argument: 0 serial, 1 parallel.
#include <benchmark/benchmark.h>

#include <memory>

#include "warpcone/actions.hpp"
#include "warpcone/qimaps.hpp"
#include "warpcone/scaleinv.hpp"
#include "warpcone/spaces.hpp"
#include "warpcone/warped.hpp"

using namespace warpcone;

namespace {

Exec mode(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

ActionSystem rotation(const FiniteNet& dom, const Rational& a) {
  ActionSystem sys(GroupSpec::free_abelian(1), dom, {GeneratorMap::rotation({a})});
  sys.verify_isometric(dom);
  return sys;
}

void BM_warped_materialize(benchmark::State& s) {
  FiniteNet dom = circle_net(1000);
  auto sys = rotation(dom, Rational(377, 1000));
  for (auto _ : s) {
    auto w = warped_closed_form_level(sys, Rational(400), dom);
    w.materialize(mode(s));
    benchmark::DoNotOptimize(w.num(1, 2));
  }
}

void BM_warped_graph(benchmark::State& s) {
  FiniteNet dom = circle_net(200);
  auto sys = rotation(dom, Rational(21, 200));
  for (auto _ : s) {
    auto w = warped_distance_graph(sys, Rational(50), dom, std::nullopt, mode(s));
    w.materialize(mode(s));
    benchmark::DoNotOptimize(w.num(0, 1));
  }
}

void BM_faithfulness_radius(benchmark::State& s) {
  FiniteNet dom = circle_net(300);
  auto sys = rotation(dom, Rational(1, 3));
  auto w = warped_closed_form_level(sys, Rational(1000), dom);
  w.materialize();
  auto cov = covering_level(sys, Rational(1000), dom, 3);
  for (auto _ : s) benchmark::DoNotOptimize(faithfulness_radius(cov, w, 3, mode(s)).radius);
}

void BM_farthest_point_order(benchmark::State& s) {
  FiniteNet net = torus_product({{circle_net(32), 32}, {circle_net(320), 320}});
  for (auto _ : s) benchmark::DoNotOptimize(farthest_point_order(net, Rational(4), mode(s)).size());
}

void BM_r_components(benchmark::State& s) {
  FiniteNet net = torus_product({{circle_net(40), 40}, {circle_net(80), 80}});
  for (auto _ : s) benchmark::DoNotOptimize(r_components(net, Rational(3), mode(s)).parts.size());
}

void BM_measure_distortion(benchmark::State& s) {
  auto src = std::make_shared<FiniteNet>(circle_net(1500));
  auto dst = std::make_shared<FiniteNet>(circle_net(500));
  MetricMap f{src, dst, {}};
  for (std::size_t i = 0; i < src->size(); ++i) f.assign.push_back(i / 3);
  DistortionOptions opt;
  opt.fixed_C = 2;
  opt.exec = mode(s);
  for (auto _ : s) benchmark::DoNotOptimize(measure_distortion(f, opt).A);
}

}  // namespace

BENCHMARK(BM_warped_materialize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_warped_graph)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_faithfulness_radius)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_farthest_point_order)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_r_components)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_measure_distortion)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

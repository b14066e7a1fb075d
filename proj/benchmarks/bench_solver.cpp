#include <benchmark/benchmark.h>

#include <cmath>

#include "uniformizer/domains.hpp"
#include "uniformizer/solver.hpp"
#include "uniformizer/transform.hpp"

using namespace uniformizer;

namespace {

std::vector<Pin> sine_pins(const GraphSpace& space) {
  std::vector<Pin> pins;
  for (auto b : space.boundary_vertices()) pins.push_back({b, std::sin(3.0 * space.coords(b)[0])});
  return pins;
}

void BM_DirichletHalfStrip(benchmark::State& state) {
  const double p = static_cast<double>(state.range(0)) / 10.0;
  const auto dom = half_strip(1.0 / static_cast<double>(state.range(1)), 8.0);
  const auto pins = sine_pins(dom.space);
  for (auto _ : state) {
    auto r = solve_p_harmonic({&dom.space.measured(), p, pins, {}});
    benchmark::DoNotOptimize(r.energy);
  }
  state.counters["vertices"] = static_cast<double>(dom.space.num_vertices());
}
BENCHMARK(BM_DirichletHalfStrip)->Args({20, 4})->Args({20, 8})->Args({15, 4})->Args({30, 4})->Unit(benchmark::kMillisecond);

void BM_UnboundedTransformed(benchmark::State& state) {
  const auto dom = half_strip(0.25, static_cast<double>(state.range(0)));
  const auto t = attach_infinity(transform(dom.space, Dampening::power(2.0), 3.0));
  ScalarField f(dom.space.num_vertices());
  for (VertexIndex v = 0; v < f.size(); ++v) f[v] = std::sin(2.0 * dom.space.coords(v)[0]);
  for (auto _ : state) {
    auto s = solve_dirichlet_unbounded(t, f, std::nullopt);
    benchmark::DoNotOptimize(s.at_infinity);
  }
}
BENCHMARK(BM_UnboundedTransformed)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_CapacityModulus(benchmark::State& state) {
  const auto dom = half_strip(0.5, 8.0);
  const auto& g = dom.space.measured();
  Condenser cond{{dom.space.index_of("v-2_0")}, {dom.space.index_of("v2_0")}, {}};
  const bool dual = state.range(0) != 0;
  for (auto _ : state) {
    const double v = dual ? modulus(g, cond, 2.0).value : capacity(g, cond, 2.0).value;
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_CapacityModulus)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

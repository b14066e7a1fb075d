#include <benchmark/benchmark.h>

#include "uniformizer/domains.hpp"
#include "uniformizer/graph_space.hpp"
#include "uniformizer/transform.hpp"

using namespace uniformizer;

namespace {

void BM_BoundaryDistance(benchmark::State& state) {
  const auto dom = slit_cone(1.0 / static_cast<double>(state.range(0)), 8.0);
  for (auto _ : state) {
    auto d = boundary_distance(dom.space);
    benchmark::DoNotOptimize(d.data());
  }
  state.counters["vertices"] = static_cast<double>(dom.space.num_vertices());
}
BENCHMARK(BM_BoundaryDistance)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Transform(benchmark::State& state) {
  const auto dom = cantor_slit(1.0 / static_cast<double>(state.range(0)), 8.0, 2);
  for (auto _ : state) {
    auto t = attach_infinity(transform(dom.space, Dampening::power(2.0), 2.0));
    benchmark::DoNotOptimize(t.d_omega.data());
  }
}
BENCHMARK(BM_Transform)->Arg(9)->Arg(27)->Unit(benchmark::kMillisecond);

}  // namespace

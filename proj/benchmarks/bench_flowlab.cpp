#include <benchmark/benchmark.h>

#include <cmath>

#include "flowlab/curve.hpp"
#include "flowlab/graph_flow.hpp"
#include "flowlab/graph_geometry.hpp"
#include "flowlab/grid.hpp"
#include "flowlab/operators.hpp"
#include "flowlab/soliton.hpp"

using namespace flowlab;

namespace {

ScalarField bump_field(int nodes) {
  auto g = StructuredGrid::rectangle(-1, 1, nodes, -1, 1, nodes);
  ScalarField u(g);
  for (int j = 0; j < nodes; ++j)
    for (int i = 0; i < nodes; ++i) {
      const double x = g.coord(0, i), y = g.coord(1, j);
      u.at(i, j) = 0.3 * std::cos(0.5 * M_PI * x) * std::cos(0.5 * M_PI * y);
    }
  return u;
}

void bm_div_flux(benchmark::State& state) {
  ScalarField u = bump_field(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(div_flux(u));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(u.size()));
}
BENCHMARK(bm_div_flux)->Arg(65)->Arg(129)->Arg(257);

void bm_graph_step(benchmark::State& state) {
  ScalarField u = bump_field(static_cast<int>(state.range(0)));
  GraphFlowState s{u, 0.0, 0.9 * cfl_limit(u.grid()), u};
  for (auto _ : state) {
    s = step(s);
    benchmark::DoNotOptimize(s.u);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(u.size()));
}
BENCHMARK(bm_graph_step)->Arg(65)->Arg(129)->Arg(257);

void bm_graph_geometry(benchmark::State& state) {
  ScalarField u = bump_field(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(graph_geometry(u));
}
BENCHMARK(bm_graph_geometry)->Arg(65)->Arg(129)->Arg(257);

void bm_curve_geometry(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  CurveState c;
  c.V = {0.0, -1.0};
  c.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = 2.0 * M_PI * static_cast<double>(i) / n;
    c.points[i] = {std::cos(th), std::sin(th)};
  }
  for (auto _ : state) benchmark::DoNotOptimize(curve_geometry(c));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}
BENCHMARK(bm_curve_geometry)->Arg(256)->Arg(1024)->Arg(4096);

void bm_stationary_solve(benchmark::State& state) {
  const int nodes = static_cast<int>(state.range(0));
  auto g = StructuredGrid::rectangle(-1, 1, nodes, -1, 1, nodes);
  const ScalarField u0(g, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(stationary_solve(u0));
}
BENCHMARK(bm_stationary_solve)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

// Serial vs OpenMP: assembly of the linear rows, the nonlinear residual, the
// coloured Jacobian and the transition-curve sweep.
#include <benchmark/benchmark.h>

#include <cmath>
#include <map>

#include "srd/free_boundary.hpp"

using namespace srd;

namespace {

struct Setup {
  FlowContext ctx;
  Grid2D grid;
  std::vector<double> psi;
};

const Setup& setup(int n) {
  static std::map<int, Setup> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    const auto pot = potential_incident(GasParams{}, 2.0);
    Setup s;
    s.ctx = make_context(pot, state_two_a(pot, 85 * kPi / 180));
    s.grid = build_grid(s.ctx.geo, initial_shock(s.ctx.geo), GridConfig{n, n, 2.0});
    s.psi.resize(s.grid.size());
    for (std::size_t k = 0; k < s.psi.size(); ++k)
      s.psi[k] = 1e-3 * std::sin(2 * s.grid.p[k][0] + 1) * std::cos(3 * s.grid.p[k][1]);
    it = cache.emplace(n, std::move(s)).first;
  }
  return it->second;
}

Exec exec_of(const benchmark::State& st) { return st.range(1) ? Exec::parallel : Exec::serial; }

void BM_assemble(benchmark::State& st) {
  const auto& s = setup(int(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(assemble(s.ctx, s.grid, s.psi, CutoffConfig{}, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * s.grid.size());
}

void BM_residual(benchmark::State& st) {
  const auto& s = setup(int(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(residual(s.ctx, s.grid, s.psi, CutoffConfig{}, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * s.grid.size());
}

void BM_jacobian(benchmark::State& st) {
  const auto& s = setup(int(st.range(0)));
  const auto F = residual(s.ctx, s.grid, s.psi, CutoffConfig{});
  for (auto _ : st) benchmark::DoNotOptimize(jacobian(s.ctx, s.grid, s.psi, F, CutoffConfig{}, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * s.grid.size());
}

void BM_transition_curve(benchmark::State& st) {
  const int n = int(st.range(0));
  for (auto _ : st)
    benchmark::DoNotOptimize(transition_curve(GasParams{}, SweepParameter::rho1, 1.5, 4.0, n, {}, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * n);
}

}  // namespace

// second argument: 0 serial, 1 OpenMP
BENCHMARK(BM_assemble)->ArgsProduct({{64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_residual)->ArgsProduct({{64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_jacobian)->ArgsProduct({{64}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_transition_curve)->ArgsProduct({{50}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

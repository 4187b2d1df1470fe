#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "syncstab/dynamics.hpp"
#include "syncstab/equilibria.hpp"
#include "syncstab/sim.hpp"
#include "syncstab/stability.hpp"

namespace {

using namespace syncstab;

// Low-voltage reference parameters (9 kW machine on a 50 Hz bus).
SynchronverterParams bench_params() {
  return {0.075, 0.00227, 25.0, 0.2, 3.0, 0.0, 3.5, 5000.0,
          31.69, 0.0,     325.26, 0.45, 2.85, 0.05};
}

GridParams bench_grid() {
  return {230.0 * std::sqrt(3.0), 100.0 * std::numbers::pi,
          100.0 * std::numbers::pi};
}

void BM_Rhs5Saturated(benchmark::State& state) {
  const auto p = bench_params();
  const auto g = bench_grid();
  const State5 z{{-15.0, -16.5, 314.0, 0.74}, 0.54};
  for (auto _ : state) {
    benchmark::DoNotOptimize(rhs5(z, p, g, true));
  }
}
BENCHMARK(BM_Rhs5Saturated);

void BM_Equilibria5(benchmark::State& state) {
  const auto p = bench_params();
  const auto g = bench_grid();
  for (auto _ : state) {
    benchmark::DoNotOptimize(equilibria5(p, g));
  }
}
BENCHMARK(BM_Equilibria5);

void BM_Jacobian5Eigenvalues(benchmark::State& state) {
  const auto p = bench_params();
  const auto g = bench_grid();
  const auto eq = equilibria5(p, g);
  const Eigen::MatrixXd j = jacobian5_unsaturated(eq.points.front().z, p, g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigenvalues(j));
  }
}
BENCHMARK(BM_Jacobian5Eigenvalues);

void BM_SweepRow(benchmark::State& state) {
  const auto p = bench_params();
  const auto g = bench_grid();
  auto spec = default_sweep_spec(p, g);
  spec.nP = 2;
  spec.nQ = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(stability_sweep(spec, p, g, 14.3e3, 5, 1));
  }
  state.SetItemsProcessed(state.iterations() * spec.nP * spec.nQ);
}
BENCHMARK(BM_SweepRow)->Arg(64)->Arg(256);

void BM_IntegrateMillisecond(benchmark::State& state) {
  const auto p = bench_params();
  const auto g = bench_grid();
  const auto eq = equilibria5(p, g);
  SimConfig cfg;
  cfg.initial = eq.points.front().z;
  cfg.initial.x.delta *= 1.01;
  cfg.t_end = 1e-3;
  cfg.dt = 1e-4;
  cfg.record_stride = 1 << 20;
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(cfg, p, g));
  }
  state.SetItemsProcessed(state.iterations() * 10);  // steps per run
}
BENCHMARK(BM_IntegrateMillisecond);

}  // namespace

BENCHMARK_MAIN();

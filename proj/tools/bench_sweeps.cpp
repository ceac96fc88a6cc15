// Serial reference vs OpenMP probe sweeps.
#include "diralg/probes.hpp"
#include "diralg/systems.hpp"

#include <benchmark/benchmark.h>

using namespace diralg;

namespace {

const DiracAlgebroid& disc() {
  static const DiracAlgebroid d = DiracAlgebroid::pi_graph(rolling_disc_algebroid(0.7));
  return d;
}

const DiracAlgebroid& induced() {
  static const DiracAlgebroid d = induce(disc(), LinearConstraint::adapted({}, {2, 3}));
  return d;
}

Execution exec_of(const benchmark::State& state) {
  return state.range(1) == 0 ? Execution::serial : Execution::parallel;
}

void BM_Isotropy(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        isotropy_sweep(induced(), static_cast<int>(state.range(0)), 1, exec_of(state)));
  }
}

void BM_Homothety(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        homothety_sweep(induced(), static_cast<int>(state.range(0)), 1, exec_of(state)));
  }
}

void BM_InduceOracle(benchmark::State& state) {
  const auto v = LinearConstraint::adapted({}, {2, 3});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        induce_oracle_sweep(disc(), v, static_cast<int>(state.range(0)), 1, exec_of(state)));
  }
}

void BM_LegendreEquivalence(benchmark::State& state) {
  const LagrangianDef l = rolling_disc_lagrangian(1.3, 0.7, 0.4, 0.9);
  const HamiltonianDef h = rolling_disc_hamiltonian(1.3, 0.7, 0.4, 0.9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(legendre_equivalence_sweep(
        induced(), l, h, static_cast<int>(state.range(0)), 1, exec_of(state)));
  }
}

void BM_Jacobi(benchmark::State& state) {
  const SkewAlgebroid a = so3_algebroid();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        jacobi_sweep(a, static_cast<int>(state.range(0)), 1, exec_of(state)));
  }
}

// range(0): probes, range(1): 0 serial, 1 parallel.
#define DIRALG_SWEEP_BENCH(fn) \
  BENCHMARK(fn)->ArgsProduct({{100, 1000}, {0, 1}})->Unit(benchmark::kMillisecond)->UseRealTime()

DIRALG_SWEEP_BENCH(BM_Isotropy);
DIRALG_SWEEP_BENCH(BM_Homothety);
DIRALG_SWEEP_BENCH(BM_InduceOracle);
DIRALG_SWEEP_BENCH(BM_LegendreEquivalence);
DIRALG_SWEEP_BENCH(BM_Jacobi);

}  // namespace

BENCHMARK_MAIN();

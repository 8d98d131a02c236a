#include <benchmark/benchmark.h>

#include "qunwrap/phase.hpp"
#include "qunwrap/qubo.hpp"
#include "qunwrap/solvers.hpp"
#include "qunwrap/superpixel.hpp"
#include "qunwrap/synth.hpp"

using namespace qunwrap;

namespace {

PhaseGrid wrapped_image(std::size_t side, std::optional<double> snr_db) {
  SynthSpec spec;
  spec.width = side;
  spec.height = side;
  spec.seed = 11;
  spec.snr_db = snr_db;
  return synthesize(spec).wrapped;
}

void BM_BuildQubo(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const UnwrapProblem p = build_problem(wrapped_image(side, 13.0));
  for (auto _ : state) benchmark::DoNotOptimize(build_qubo(p));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}
BENCHMARK(BM_BuildQubo)->Arg(10)->Arg(50)->Arg(100);

void BM_QuboEnergy(benchmark::State& state) {
  const EncodedProblem e = build_qubo(build_problem(wrapped_image(100, 13.0)));
  BitVector x(e.qubo.num_vars());
  for (std::size_t i = 0; i < x.size(); i += 3) x[i] = 1;
  for (auto _ : state) benchmark::DoNotOptimize(qubo_energy(e.qubo, x));
}
BENCHMARK(BM_QuboEnergy);

// One 10x10 tile, D = 4: 200 binary variables.
void BM_TileSolve(benchmark::State& state) {
  const auto kind = static_cast<SolverKind>(state.range(0));
  const EncodedProblem e = build_qubo(build_problem(wrapped_image(10, 13.0)));
  SolverConfig c;
  c.num_sweeps = 300;
  c.replicas_per_temperature = kind == SolverKind::Pticm ? 2 : 1;
  c.icm_enabled = kind == SolverKind::Pticm;
  const auto solver = make_solver(kind);
  for (auto _ : state) benchmark::DoNotOptimize(solver->solve(e.qubo, c));
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_TileSolve)
    ->Arg(static_cast<int>(SolverKind::SimulatedAnnealing))
    ->Arg(static_cast<int>(SolverKind::ParallelTempering))
    ->Arg(static_cast<int>(SolverKind::Pticm))
    ->Unit(benchmark::kMillisecond);

void BM_Pipeline(benchmark::State& state) {
  const PhaseGrid w = wrapped_image(static_cast<std::size_t>(state.range(0)), std::nullopt);
  PipelineOptions o;
  o.solver = SolverKind::Pticm;
  o.config.num_sweeps = 100;
  o.config.replicas_per_temperature = 2;
  o.config.icm_enabled = true;
  o.domain_size = 5;
  o.tile_domain_size = 4;
  o.centre_tile_bias = true;
  for (auto _ : state) benchmark::DoNotOptimize(unwrap_superpixel(w, o));
}
BENCHMARK(BM_Pipeline)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_EdgeConstant(benchmark::State& state) {
  double a = -3.0, b = 2.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(edge_constant(a, b));
    a = wrap(a + 0.37);
    b = wrap(b - 0.71);
  }
}
BENCHMARK(BM_EdgeConstant);

}  // namespace

BENCHMARK_MAIN();

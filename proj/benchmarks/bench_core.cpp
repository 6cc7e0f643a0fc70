#include <benchmark/benchmark.h>

#include "gupsim/bounds.hpp"
#include "gupsim/fock.hpp"
#include "gupsim/protocol.hpp"
#include "gupsim/units.hpp"
#include "gupsim/zassenhaus.hpp"

using namespace gupsim;

static void BM_ExpmGenerator(benchmark::State& state) {
  const auto d = static_cast<fock::Index>(state.range(0));
  const auto q = fock::quadratures(d, units::OscillatorScales::natural());
  const auto g = fock::Complex(0.0, 0.7) * q.x;
  for (auto _ : state) benchmark::DoNotOptimize(fock::expm_generator(g));
}
BENCHMARK(BM_ExpmGenerator)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_OracleCycle(benchmark::State& state) {
  const auto d = static_cast<fock::Index>(state.range(0));
  const auto plan = protocol::natural_plan(1.0, 1e-4, 1);
  for (auto _ : state) benchmark::DoNotOptimize(protocol::NumericOracle(plan, d).run(1));
}
BENCHMARK(BM_OracleCycle)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_TotalPhase(benchmark::State& state) {
  const auto cat = bounds::load_default_catalog();
  const auto& yb = cat.find("Yb171");
  const auto plan = protocol::make_plan(yb.plan_inputs(cat.reference_beta0), units::pinned_constants());
  const auto bits = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(protocol::total_phase(plan, bits));
}
BENCHMARK(BM_TotalPhase)->Arg(128)->Arg(256)->Arg(1024);

static void BM_BoundSolve(benchmark::State& state) {
  const auto cat = bounds::load_default_catalog();
  const auto& yb = cat.find("Yb171");
  const auto constants = units::pinned_constants();
  for (auto _ : state) benchmark::DoNotOptimize(bounds::solve_beta0_bound(yb, 1e-5, constants));
}
BENCHMARK(BM_BoundSolve)->Unit(benchmark::kMillisecond);

static void BM_ZassenhausTerms(benchmark::State& state) {
  const auto d = static_cast<fock::Index>(state.range(0));
  const auto plan = protocol::natural_plan(4.0, 1e-4, 1);
  const auto g = zassenhaus::pulse_split_generators(plan.laser, plan.gup, plan.scales,
                                                 plan.laser.pulse_duration, d);
  for (auto _ : state) benchmark::DoNotOptimize(zassenhaus::zassenhaus_terms(g.A, g.B));
}
BENCHMARK(BM_ZassenhausTerms)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <vector>

#include "decaylab/diagnostics.hpp"
#include "decaylab/duhamel.hpp"
#include "decaylab/handoff.hpp"
#include "decaylab/initial_data.hpp"
#include "decaylab/solver_cart3d.hpp"
#include "decaylab/solver_radial.hpp"

using namespace decaylab;

namespace {

InitialDataSpec bump(double amplitude) {
  InitialDataSpec spec;
  spec.amplitude = amplitude;
  return spec;
}

// Node updates per second of the radial leapfrog.
void BM_RadialStep(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  const FieldSnapshot data = build_bump_data(bump(10.0), RadialGrid::with_spacing(6.0, h));
  RadialEvolutionOptions o;
  o.t_end = 5.0;
  std::size_t updates = 0;
  for (auto _ : state) {
    const RadialRun run = evolve_physical_radial(data, Power::scenario(3.0), o);
    updates += run.steps * data.size();
    benchmark::DoNotOptimize(run.snapshots.back().value().data());
  }
  state.counters["updates/s"] = benchmark::Counter(static_cast<double>(updates), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_RadialStep)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

// 7-point stencil throughput; the second argument is the worker count.
void BM_CartesianStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  InitialDataSpec spec = bump(10.0);
  spec.support_radius = 0.4;
  const FieldSnapshot data = build_bump_data(spec, CartesianGrid3::make(3.0, n));
  Cart3dOptions o;
  o.t_end = 2.0;
  o.workers = static_cast<std::size_t>(state.range(1));
  o.active_box = false;
  std::size_t updates = 0;
  for (auto _ : state) {
    const Cart3dRun run = evolve_physical_3d(data, Power::scenario(3.0), o);
    updates += run.steps * data.size();
    benchmark::DoNotOptimize(run.probes.times.data());
  }
  state.counters["updates/s"] = benchmark::Counter(static_cast<double>(updates), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_CartesianStep)->Args({65, 1})->Args({97, 1})->Args({97, 2})->Unit(benchmark::kMillisecond);

void BM_MantleFlux(benchmark::State& state) {
  const Power p = Power::scenario(3.0);
  const FieldSnapshot data = build_bump_data(bump(10.0), RadialGrid::with_spacing(3.0, 1.0 / 128.0));
  HandoffSettings hs;
  hs.physical_spacing = 1.0 / 128.0;
  hs.truncation_radius = 0.95;
  hs.taper_start = 0.9;
  const FieldSnapshot psi = radial_handoff(data, p, RadialGrid::with_points(1.0 + 16.0 / 400.0, 417), hs);
  CompactifiedRadialOptions o;
  o.t_end = -0.05;
  o.output_stride = 4;
  const RadialRun run = evolve_compactified_radial(psi, p, o);
  const auto quad = ConeQuadrature{static_cast<std::size_t>(state.range(0)), 32,
                                   static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mantle_flux(run.snapshots, {-0.3, {0.1, 0.0, 0.05}}, p, quad).flux);
  }
}
BENCHMARK(BM_MantleFlux)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_Kirchhoff(benchmark::State& state) {
  InitialDataSpec spec = bump(1.0);
  spec.center = {0.1, 0.0, 0.0};
  spec.support_radius = 0.3;
  double t = 1.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(free_solution_kirchhoff(spec, {t, {0.2, 0.3, 0.1}}));
    t = t > 3.0 ? 1.5 : t + 1e-3;
  }
}
BENCHMARK(BM_Kirchhoff);

void BM_LemmaPoint(benchmark::State& state) {
  const std::vector<SpacetimePoint> pt{{static_cast<double>(state.range(0)), {0.0, 0.0, 0.0}}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(decay_lemma_ratio(Power::duhamel(3.0), pt).max_ratio);
  }
}
BENCHMARK(BM_LemmaPoint)->Arg(5)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "lagsym/affine.hpp"
#include "lagsym/catalog.hpp"
#include "lagsym/verify.hpp"

using namespace lagsym;

namespace {

void BM_fixed_locus_census(benchmark::State& state) {
  const ModelPtr nodal = model_by_name("nodal");
  CensusOptions opts;
  opts.n_samples = static_cast<int>(state.range(0));
  opts.jobs = 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fixed_locus_census(*nodal, nodal->involution().map, opts).component_count);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_fixed_locus_census)->Arg(20000)->Arg(80000)->Unit(benchmark::kMillisecond);

void BM_amoeba_raster(benchmark::State& state) {
  AmoebaSpec spec;
  spec.nx = spec.ny = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(amoeba_raster(spec).unbounded_complement_components);
  }
}
BENCHMARK(BM_amoeba_raster)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_fiber_fixed_count(benchmark::State& state) {
  const ModelPtr nodal = model_by_name("nodal");
  Eigen::VectorXd b(2);
  b << 0.4, 0.3;
  FiberFixedOptions opts;
  opts.jobs = 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fiber_fixed_count(*nodal, nodal->involution().map, b, opts).count);
  }
}
BENCHMARK(BM_fiber_fixed_count)->Unit(benchmark::kMillisecond);

}  // namespace

#include <benchmark/benchmark.h>

#include "lagsym/calculus.hpp"
#include "lagsym/catalog.hpp"
#include "lagsym/flow.hpp"

using namespace lagsym;

namespace {

Eigen::VectorXd seed_point() {
  Eigen::VectorXd x(4);
  x << 1.0, 0.2, 0.8, -0.1;
  return x;
}

void BM_hamiltonian_flow_steps(benchmark::State& state) {
  const ModelPtr ff = model_by_name("ff_nonproper");
  Eigen::VectorXd w(2);
  w << 0.7, -0.4;
  const SmoothMap H = weighted_components(ff->fibration, w);
  const Eigen::VectorXd x0 = seed_point();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        hamiltonian_flow(ff->structure, H, x0, 1.0, static_cast<int>(state.range(0))));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_hamiltonian_flow_steps)->Arg(250)->Arg(1000)->Arg(4000);

void BM_jacobian_forward_mode(benchmark::State& state) {
  const ModelPtr nodal = model_by_name("nodal");
  const Eigen::VectorXd x = seed_point();
  for (auto _ : state) {
    benchmark::DoNotOptimize(jacobian(nodal->fibration, x));
  }
}
BENCHMARK(BM_jacobian_forward_mode);

void BM_jacobian_differences(benchmark::State& state) {
  const ModelPtr thin = model_by_name("negative_thin");  // no forward-mode path
  Eigen::VectorXd x(6);
  x << 1.2, 0.9, 0.8, 0.1, -0.2, 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(jacobian(thin->fibration, x));
  }
}
BENCHMARK(BM_jacobian_differences);

void BM_lagrangian_residual(benchmark::State& state) {
  const ModelPtr pos = model_by_name("positive_proper");
  Eigen::VectorXd x(6);
  x << 1.2, 0.9, 0.8, 0.1, -0.2, 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lagrangian_residual(pos->structure, pos->fibration, x));
  }
}
BENCHMARK(BM_lagrangian_residual);

}  // namespace

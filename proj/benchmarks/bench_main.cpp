#include <benchmark/benchmark.h>

#include <vector>

#include "cusplab/estimators.hpp"
#include "cusplab/fbm.hpp"
#include "cusplab/limit_laws.hpp"
#include "cusplab/path_sim.hpp"

using namespace cusplab;

namespace {

const CuspSignal kCusp(1.0, 0.25, 1.0, {0.1, 0.9});

ObservationPath make_path(std::size_t steps) {
  Rng rng(1);
  return simulate_path(kCusp, 0.5, 0.01, TimeGrid(1.0, steps), rng);
}

void BM_DirectContrast(benchmark::State& state) {
  const auto path = make_path(static_cast<std::size_t>(state.range(0)));
  LikelihoodEvaluator ev(path, kCusp);
  double theta = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ev.contrast(theta));
    theta = theta < 0.7 ? theta + 1e-4 : 0.3;
  }
}
BENCHMARK(BM_DirectContrast)->Arg(10000)->Arg(40000);

// One lattice call fills every theta = t_k + j dt / m inside the bounds.
void BM_LatticeContrast(benchmark::State& state) {
  const auto path = make_path(static_cast<std::size_t>(state.range(0)));
  LikelihoodEvaluator ev(path, kCusp);
  std::vector<double> theta;
  std::vector<double> values;
  for (auto _ : state) {
    ev.lattice(static_cast<std::size_t>(state.range(1)), 0.1, 0.9, theta, values);
    benchmark::DoNotOptimize(values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(values.size()));
}
BENCHMARK(BM_LatticeContrast)->Args({10000, 1})->Args({10000, 8})->Args({40000, 1});

void BM_MleAndBayes(benchmark::State& state) {
  const auto path = make_path(10000);
  const auto prior = Prior::uniform(kCusp.theta_bounds());
  for (auto _ : state) benchmark::DoNotOptimize(mle_and_bayes(path, kCusp, prior));
}
BENCHMARK(BM_MleAndBayes)->Unit(benchmark::kMillisecond);

void BM_FbmSample(benchmark::State& state) {
  const auto method = state.range(1) == 0 ? FbmMethod::kCholesky : FbmMethod::kCirculant;
  const FbmSampler sampler(0.75, static_cast<std::size_t>(state.range(0)), 0.01, method);
  std::vector<double> x(sampler.grid().size());
  Rng rng(2);
  for (auto _ : state) {
    sampler.sample_into(rng, x);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_FbmSample)->Args({1000, 0})->Args({1000, 1})->Args({2000, 0})->Args({2000, 1});

void BM_GammaSquared(benchmark::State& state) {
  double kappa = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gamma_squared(1.0, kappa));
    kappa = kappa < 0.4 ? kappa + 0.01 : 0.1;
  }
}
BENCHMARK(BM_GammaSquared);

}  // namespace

BENCHMARK_MAIN();

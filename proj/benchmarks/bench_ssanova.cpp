// Microbenchmarks for the hot paths: Gram assembly, kernel and derivative
// evaluation, bootstrap replicates, and the tuning sweep.

#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include "ssanova/hypotest.hpp"
#include "ssanova/kernel.hpp"
#include "ssanova/krr.hpp"
#include "ssanova/rng.hpp"
#include "ssanova/tuning.hpp"

using namespace ssanova;

namespace {

Eigen::MatrixXd uniform_design(int n, int r, std::uint64_t key) {
  Rng rng(key);
  return sample_eval_points(SamplingDensity::Uniform, r, n, rng);
}

Eigen::VectorXd normal_response(int n, std::uint64_t key) {
  Rng rng(key);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = rng.normal();
  return y;
}

void BM_GramAssembly(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const KernelSpec spec(2, 2, 5);
  const Eigen::MatrixXd X = uniform_design(n, 5, 91);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gram_matrix(spec, X));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_GramAssembly)->Arg(50)->Arg(100)->Arg(200)->Complexity(benchmark::oNSquared);

void BM_KernelValue(benchmark::State& state) {
  const KernelSpec spec(2, static_cast<int>(state.range(0)), 5);
  const AnovaKernel kernel(spec);
  const Eigen::MatrixXd pts = uniform_design(2, 5, 92);
  const Eigen::VectorXd x = pts.row(0);
  const Eigen::VectorXd y = pts.row(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel.value(x, y));
  }
}
BENCHMARK(BM_KernelValue)->Arg(1)->Arg(3)->Arg(5);

void BM_DerivativeRow(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const KernelSpec spec(2, 2, 5);
  const Dataset data(uniform_design(n, 5, 93), normal_response(n, 94));
  const FittedModel model = fit(spec, data, 1e-3);
  const Eigen::VectorXd x = uniform_design(1, 5, 95).row(0);
  const DerivativeOrder beta({1, 0, 0, 0, 0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.predict_derivative(beta, x));
  }
}
BENCHMARK(BM_DerivativeRow)->Arg(100)->Arg(400);

void BM_BootstrapReplicate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const KernelSpec spec(2, 1, 5);
  const Dataset data(uniform_design(n, 5, 96), normal_response(n, 97));
  const FittedModel model = fit(spec, data, 1e-3);
  const DerivativeOrder beta({1, 0, 0, 0, 0});
  Rng wr(98);
  const BootstrapWeights weights = draw_weights(WeightFamily::ExponentialMeanOne, n, wr);
  Rng pr(99);
  const Eigen::MatrixXd points = sample_eval_points(SamplingDensity::Uniform, 5, 100, pr);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        bootstrap_statistics(model, beta, {weights}, {points}, 1).front());
  }
}
BENCHMARK(BM_BootstrapReplicate)->Arg(100)->Arg(200);

void BM_TuningSweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const KernelSpec spec(2, 1, 5);
  const Eigen::MatrixXd X = uniform_design(n, 5, 100);
  const Eigen::VectorXd y = normal_response(n, 101);
  const Eigen::MatrixXd R = gram_matrix(spec, X);
  const TuningGrid grid = TuningGrid::log_spaced();
  for (auto _ : state) {
    const GramSpectrum spectrum(R, y);  // eigendecomposition dominates
    benchmark::DoNotOptimize(select_lambda(spectrum, grid).best_lambda);
  }
}
BENCHMARK(BM_TuningSweep)->Arg(100)->Arg(200);

}  // namespace

BENCHMARK_MAIN();

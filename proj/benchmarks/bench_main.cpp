#include <benchmark/benchmark.h>

#include "stochcat/builders.hpp"
#include "stochcat/gaussian.hpp"
#include "stochcat/kernels.hpp"
#include "stochcat/learn.hpp"
#include "stochcat/likelihood.hpp"

using namespace stochcat;

namespace {

const SampleSpace kUnit{1, BaseMeasure::Uniform01};

void BM_SampleOmega(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SampleStream s(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_omega(kUnit, n, s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleOmega)->Arg(1 << 10)->Arg(1 << 16);

void BM_ParaSelfComposite(benchmark::State& state) {
  const ParaArrow f = demo_arrow(kUnit);
  const ParaArrow ff = para_compose(f, f);
  const OmegaVector omega = sample_omega(kUnit, 2, SampleStream(2));
  const Vec x = Vec::Constant(1, 42.0);
  for (auto _ : state) benchmark::DoNotOptimize(ff(omega, x));
}
BENCHMARK(BM_ParaSelfComposite);

void BM_GaussTripleCompose(benchmark::State& state) {
  const auto d = static_cast<int>(state.range(0));
  const GaussTriple t{Mat::Identity(d, d) * 0.5, Vec::Ones(d), Mat::Identity(d, d)};
  for (auto _ : state) benchmark::DoNotOptimize(compose(t, t));
}
BENCHMARK(BM_GaussTripleCompose)->Arg(2)->Arg(16)->Arg(64);

void BM_EmpiricalKernelCompose(benchmark::State& state) {
  const MarkovKernel f = push_forward(demo_arrow(kUnit), PushMode::Empirical);
  const MarkovKernel ff = kernel_compose(f, f);
  const Vec x = Vec::Constant(1, 42.0);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ff.sample_n(x, n, SampleStream(4)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EmpiricalKernelCompose)->Arg(1 << 14);

void BM_QuadratureComposite(benchmark::State& state) {
  const LikelihoodFn r = likelihood_of(linear_regression(kUnit));
  const LikelihoodFn c = likelihood_compose(r, r, ComposeMethod::Quadrature, static_cast<int>(state.range(0)));
  const Vec p = (Vec(6) << 1.0, 0.5, 0.7, 2.0, -1.0, 1.2).finished();
  const Vec x = Vec::Constant(1, 0.3);
  for (auto _ : state) {
    const ScalarDensity d = c.bind(p)(x);
    benchmark::DoNotOptimize(d(1.0));
  }
}
BENCHMARK(BM_QuadratureComposite)->Arg(257)->Arg(2049);

void BM_TrainRegression(benchmark::State& state) {
  const int n = 1000;
  Mat xs(n, 1), ys(n, 1);
  const SampleStream s(3);
  for (int i = 0; i < n; ++i) {
    xs(i, 0) = s.split(i).normal(0);
    ys(i, 0) = 2.0 * xs(i, 0) + 1.0 + 0.5 * s.split(i).normal(1);
  }
  const Dataset data{xs, ys};
  const LearnConfig cfg{0.01, static_cast<int>(state.range(0))};
  const Learner l = backprop_functor(exp_functor(as_df_arrow(linear_regression(kUnit))), cfg,
                                     (Vec(3) << 0.0, 0.0, 0.5).finished());
  for (auto _ : state) benchmark::DoNotOptimize(train(l, data, cfg));
}
BENCHMARK(BM_TrainRegression)->Arg(1)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

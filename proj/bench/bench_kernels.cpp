#include <benchmark/benchmark.h>

#include "binreg/kernels.hpp"
#include "binreg/mle.hpp"
#include "binreg/parallel.hpp"
#include "binreg/rng.hpp"
#include "binreg/verify.hpp"

namespace {

using namespace binreg;

struct Problem {
  Matrix xt;
  std::vector<int> y;
  Vector theta;
};

Problem make(std::size_t n, std::size_t d) {
  CounterRng rng(1);
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<int> y(n);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.normal();
    y[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(2));
  }
  return {intercept_design(x), y, Vector::Constant(static_cast<Eigen::Index>(d + 1), 0.1)};
}

void BM_SerialHessian(benchmark::State& state) {
  const Problem p = make(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernels::serial_evaluate(p.xt, p.y, probit_link(), p.theta, kernels::Order::Hessian));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ParallelHessian(benchmark::State& state) {
  const Problem p = make(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernels::parallel_evaluate(p.xt, p.y, probit_link(), p.theta, kernels::Order::Hessian));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_SerialHessian)->RangeMultiplier(8)->Range(512, 1 << 18)->UseRealTime();
BENCHMARK(BM_ParallelHessian)->RangeMultiplier(8)->Range(512, 1 << 18)->UseRealTime();

void BM_FitLogit(benchmark::State& state) {
  const Dataset ds = gen_overlapping(static_cast<std::size_t>(state.range(0)), 3, 7);
  for (auto _ : state) benchmark::DoNotOptimize(fit(ds, logit_link()));
}
BENCHMARK(BM_FitLogit)->Arg(40)->Arg(4000)->Arg(40000)->UseRealTime();

void BM_AngleSuite(benchmark::State& state) {
  SuiteConfig c;
  c.theorem = Theorem::AcuteAngle;
  c.link = &logit_link();
  c.trials = 200;
  c.dims = {2, 3};
  for (auto _ : state) benchmark::DoNotOptimize(run_suite(c));
}
BENCHMARK(BM_AngleSuite)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

int main(int argc, char** argv) {
  binreg::configure_threads_from_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}

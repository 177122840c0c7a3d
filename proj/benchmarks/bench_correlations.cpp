#include <benchmark/benchmark.h>

#include "ppm/correlations.hpp"

namespace {

const ppm::FluctConstants kFc = ppm::fluct_constants(ppm::canonical_to_macro({0.2, 0.625, 0.4, 0.2, 10.0}));

void BM_ClosedForm(benchmark::State& state) {
  double tau = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ppm::correlation(ppm::PairKind::xy, kFc, tau));
    tau += 0.01;
    if (tau > 50.0) tau = 0.0;
  }
}
BENCHMARK(BM_ClosedForm);

void BM_Quadrature(benchmark::State& state) {
  const double tau = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ppm::correlation_oracle(ppm::PairKind::xy, kFc, tau));
}
BENCHMARK(BM_Quadrature)->Arg(0)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

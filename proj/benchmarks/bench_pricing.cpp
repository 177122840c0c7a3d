#include <benchmark/benchmark.h>

#include "ppm/analytics.hpp"
#include "ppm/pricing.hpp"

namespace {

const ppm::MacroParams kMarket = ppm::canonical_to_macro({0.2, 0.643, 0.4, 0.2, 10.0});

ppm::Trajectory reference_run() {
  ppm::Rng rng(1);
  return ppm::simulate(ppm::coexistence_state(kMarket, 1000), kMarket, 4800.0, rng);
}

void BM_ExcessDemand(benchmark::State& state) {
  const ppm::Trajectory tr = reference_run();
  ppm::PricingConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(ppm::excess_demand_price(tr, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tr.size()));
}
BENCHMARK(BM_ExcessDemand)->Unit(benchmark::kMillisecond);

void BM_Liquidity(benchmark::State& state) {
  const ppm::Trajectory tr = reference_run();
  ppm::PricingConfig cfg;
  cfg.xi = 0.05;
  cfg.zeta = ppm::coexistence_zeta(kMarket);
  for (auto _ : state) benchmark::DoNotOptimize(ppm::liquidity_price(tr, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tr.size()));
}
BENCHMARK(BM_Liquidity)->Unit(benchmark::kMillisecond);

void BM_ReturnAcf(benchmark::State& state) {
  const ppm::Trajectory tr = reference_run();
  ppm::PricingConfig cfg;
  const ppm::PriceSeries ps = ppm::excess_demand_price(tr, cfg);
  for (auto _ : state)
    benchmark::DoNotOptimize(ppm::autocorrelation(ppm::fixed_time_returns(ps, 1.0, 1.0).samples, 60));
}
BENCHMARK(BM_ReturnAcf)->Unit(benchmark::kMicrosecond);

}  // namespace

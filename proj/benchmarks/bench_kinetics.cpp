#include <benchmark/benchmark.h>

#include "ppm/kinetics.hpp"

namespace {

const ppm::MacroParams kMarket = ppm::canonical_to_macro({0.2, 0.643, 0.4, 0.2, 10.0});

void BM_Events(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const ppm::AgentState init = ppm::coexistence_state(kMarket, N);
  std::uint64_t events = 0;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    ppm::Rng rng(seed++);
    const auto sum = ppm::run_events(init, kMarket, 1000.0, rng, [](double, ppm::Channel, const ppm::AgentState&) {});
    events += sum.events;
    benchmark::DoNotOptimize(sum.final_state);
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Events)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_GridRecorder(benchmark::State& state) {
  const ppm::AgentState init = ppm::coexistence_state(kMarket, 1000);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    ppm::Rng rng(seed++);
    ppm::GridRecorder rec(init, 1.0, 1000.0);
    ppm::run_events(init, kMarket, 1000.0, rng, rec);
    benchmark::DoNotOptimize(rec.finish());
  }
}
BENCHMARK(BM_GridRecorder)->Unit(benchmark::kMillisecond);

}  // namespace

#include <benchmark/benchmark.h>

#include <string>

#include "config.hpp"
#include "sensched/sensched.hpp"

using namespace sensched;

namespace {

std::vector<SystemModel> fixture(const char* name) {
  return cli::load_config(std::string(SENSCHED_FIXTURE_DIR) + "/" + name + ".json").systems;
}

// Fresh models so the trace tables are rebuilt each time.
std::vector<SystemModel> rebuilt(const std::vector<SystemModel>& sys) {
  std::vector<SystemModel> out;
  for (const auto& s : sys) out.emplace_back(s.id(), s.system());
  return out;
}

void BM_SteadyState(benchmark::State& state) {
  const auto sys = fixture("large15");
  for (auto _ : state) {
    for (const auto& s : sys) benchmark::DoNotOptimize(steady_state_covariance(s.system()));
  }
}
BENCHMARK(BM_SteadyState);

void BM_Bounds(benchmark::State& state) {
  const auto base = fixture(state.range(0) == 0 ? "trio_a" : "large15");
  for (auto _ : state) {
    const auto sys = rebuilt(base);
    benchmark::DoNotOptimize(all_bounds(sys));
  }
}
BENCHMARK(BM_Bounds)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MdpBuild(benchmark::State& state) {
  const auto sys = fixture("trio_b");
  const auto b = all_bounds(sys);
  for (auto _ : state) benchmark::DoNotOptimize(build_mdp(sys, b).size());
}
BENCHMARK(BM_MdpBuild)->Unit(benchmark::kMillisecond);

void BM_MdpSolve(benchmark::State& state) {
  const auto sys = fixture("trio_b");
  const auto m = build_mdp(sys, all_bounds(sys));
  for (auto _ : state) benchmark::DoNotOptimize(solve_average_reward(m).gain);
}
BENCHMARK(BM_MdpSolve)->Unit(benchmark::kMillisecond);

void BM_Mef(benchmark::State& state) {
  const auto sys = fixture("large15");
  for (auto _ : state) benchmark::DoNotOptimize(mef_schedule(sys).schedule.period());
}
BENCHMARK(BM_Mef)->Unit(benchmark::kMillisecond);

void BM_RecedingHorizon(benchmark::State& state) {
  const auto sys = fixture("trio_a");
  const int window = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rh_schedule(sys, window).schedule.period());
}
BENCHMARK(BM_RecedingHorizon)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

void BM_LowerBound(benchmark::State& state) {
  const auto sys = fixture("large15");
  const auto b = all_bounds(sys);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lower_bound(sys, b).value);
}
BENCHMARK(BM_LowerBound);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "bosg/mission.hpp"

using namespace bosg;

namespace {

void BM_MockLabExploration(benchmark::State& state) {
  MissionConfig c;
  c.scenario_path = std::string(BOSG_SCENARIO_DIR) + "/mock_lab.scn";
  c.seed = 42;
  for (auto _ : state) {
    const MissionSummary s = run_mission(c);
    state.counters["steps"] = static_cast<double>(s.steps);
  }
}
BENCHMARK(BM_MockLabExploration)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

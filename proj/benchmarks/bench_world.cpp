#include <benchmark/benchmark.h>

#include <numbers>

#include "bosg/mission.hpp"
#include "bosg/recorder.hpp"
#include "bosg/world.hpp"

using namespace bosg;

namespace {

const std::string kMockLab = std::string(BOSG_SCENARIO_DIR) + "/mock_lab.scn";

void BM_Raycast(benchmark::State& state) {
  const WorldModel w = load_scenario_file(kMockLab);
  const Pose2 origin = w.robot().pose;
  double angle = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(w.raycast(origin, angle, 20.0));
    angle += 0.0137;
    if (angle > 2.0 * std::numbers::pi) angle = 0.0;
  }
}
BENCHMARK(BM_Raycast);

void BM_Sense(benchmark::State& state) {
  WorldModel w = load_scenario_file(kMockLab);
  const SensorConfig sensor;
  for (auto _ : state) benchmark::DoNotOptimize(w.sense(sensor));
}
BENCHMARK(BM_Sense);

void BM_ExtractFrontiers(benchmark::State& state) {
  MissionConfig c;
  c.scenario_path = kMockLab;
  c.seed = 42;
  Mission m(c);
  for (int i = 0; i < 100; ++i) m.step();
  for (auto _ : state) benchmark::DoNotOptimize(m.recorder().extract_frontiers());
}
BENCHMARK(BM_ExtractFrontiers);

}  // namespace

#include <benchmark/benchmark.h>

#include <random>

#include "bosg/planner.hpp"

using namespace bosg;

namespace {

// Square lattice of waypoints with GOTO pairs to the right and below, random
// costs, and every fifth node a frontier.
SituationalGraph lattice(int side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cost(0.1, 10.0);
  SituationalGraph g;
  std::vector<NodeId> ids;
  for (int i = 0; i < side * side; ++i) {
    ids.push_back(g.add_node(Pose2(i % side, i / side), i % 5 == 4 ? NodeKind::FRONTIER : NodeKind::WAYPOINT));
  }
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const NodeId a = ids[y * side + x];
      if (x + 1 < side) g.add_edge(a, ids[y * side + x + 1], BehaviorKind::GOTO, {}, cost(rng));
      if (y + 1 < side) g.add_edge(a, ids[(y + 1) * side + x], BehaviorKind::GOTO, {}, cost(rng));
    }
  }
  return g;
}

void BM_PlanPath(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const SituationalGraph g = lattice(side, 1);
  const NodeId from{1};
  const NodeId to{static_cast<std::uint64_t>(side * side)};
  for (auto _ : state) benchmark::DoNotOptimize(plan_path(g, from, to));
  state.SetComplexityN(side * side);
}
BENCHMARK(BM_PlanPath)->RangeMultiplier(2)->Range(4, 32)->Complexity();

void BM_SelectJob(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const SituationalGraph g = lattice(side, 2);
  const RewardModel rewards{1000.0, {}};
  for (auto _ : state) benchmark::DoNotOptimize(select_job(g, NodeId{1}, rewards));
  state.SetComplexityN(side * side);
}
BENCHMARK(BM_SelectJob)->RangeMultiplier(2)->Range(4, 32)->Complexity();

}  // namespace

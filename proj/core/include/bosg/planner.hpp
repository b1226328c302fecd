#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bosg/graph.hpp"

namespace bosg {

/// Ordered sequence of edges carrying the robot from `start` to `goal`.
struct Plan {
  NodeId start;
  NodeId goal;
  std::vector<EdgeId> edges;
  double total_cost = 0.0;

  friend bool operator==(const Plan&, const Plan&) = default;
};

struct Job {
  NodeId target;
  double reward = 0.0;
  double cost = 0.0;
  double net = 0.0;
};

enum class AutonomyLevel { L1_FULL_AUTONOMY = 1, L2_OPERATOR_JOBS = 2, L3_OPERATOR_BEHAVIOR = 3, L4_TELEOP = 4 };

int to_int(AutonomyLevel l);
AutonomyLevel autonomy_from_int(int level);

/// Flat positive reward on frontier nodes, zero elsewhere. `custom`, when set,
/// replaces the flat model for every node.
struct RewardModel {
  double frontier_reward = 50.0;
  std::function<double(const Node&)> custom;

  double reward(const Node& n) const;
};

/// Cheapest path from one node to every reachable node. Equal-cost paths are
/// resolved to the lexicographically smallest edge-id sequence.
/// REQUEST_TELEOP edges never take part.
struct ShortestPaths {
  NodeId source;
  std::map<NodeId, double> cost;
  std::map<NodeId, std::vector<EdgeId>> path;
};

ShortestPaths shortest_paths(const GraphState& graph, NodeId from);

/// Throws UnknownNode or NoPath.
Plan plan_path(const GraphState& graph, NodeId from, NodeId to);

/// Frontier maximizing reward minus plan cost; nullopt when none is reachable
/// or every reachable one has net <= 0.
std::optional<Job> select_job(const GraphState& graph, NodeId current, const RewardModel& rewards = {});

struct PlannerState {
  AutonomyLevel level = AutonomyLevel::L1_FULL_AUTONOMY;
  NodeId current;
  std::optional<Plan> active_plan;
  std::optional<NodeId> operator_job;
};

struct ExecuteEdge {
  EdgeId edge;
};
struct Idle {};
struct MissionComplete {};
using Decision = std::variant<ExecuteEdge, Idle, MissionComplete>;

/// Decision plus whatever the planner computed to reach it, for logging.
struct TickResult {
  Decision decision = Idle{};
  PlannerState state;
  std::optional<Job> job;      ///< set when job selection ran and found a job
  std::optional<Plan> plan;    ///< set when a fresh plan was computed
  std::vector<std::string> notifications;
};

/// One planning-server step. L1 selects jobs and plans, L2 plans toward the
/// operator's job, L3 and L4 are idle.
TickResult planner_tick(const GraphState& graph, PlannerState state, const RewardModel& rewards = {});

/// Drops the active plan when one of its edges or nodes was removed.
PlannerState replan_on_delta(PlannerState state, const std::vector<GraphDelta>& deltas);

/// Whether every plan edge still exists and the edges chain start->goal.
bool plan_valid(const GraphState& graph, const Plan& plan);

}  // namespace bosg

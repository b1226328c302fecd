#include "bosg/planner.hpp"

#include <queue>
#include <set>

#include "bosg/errors.hpp"

namespace bosg {

int to_int(AutonomyLevel l) { return static_cast<int>(l); }

AutonomyLevel autonomy_from_int(int level) {
  if (level < 1 || level > 4) throw InvariantViolation("autonomy level must be 1..4");
  return static_cast<AutonomyLevel>(level);
}

double RewardModel::reward(const Node& n) const {
  if (custom) return custom(n);
  return n.kind == NodeKind::FRONTIER ? frontier_reward : 0.0;
}

namespace {

struct Label {
  double cost;
  std::vector<EdgeId> path;
  NodeId node;
};

// Min-heap on (cost, path) so equal-cost ties settle to the smaller sequence.
struct LabelGreater {
  bool operator()(const Label& a, const Label& b) const {
    if (a.cost != b.cost) return a.cost > b.cost;
    return a.path > b.path;
  }
};

}  // namespace

ShortestPaths shortest_paths(const GraphState& graph, NodeId from) {
  if (!graph.has_node(from)) throw UnknownNode("node " + std::to_string(from.value));
  ShortestPaths out;
  out.source = from;
  std::priority_queue<Label, std::vector<Label>, LabelGreater> heap;
  heap.push({0.0, {}, from});
  while (!heap.empty()) {
    Label top = heap.top();
    heap.pop();
    if (out.cost.contains(top.node)) continue;
    out.cost[top.node] = top.cost;
    for (EdgeId id : graph.out_edge_ids(top.node)) {
      const Edge& e = graph.edge(id);
      if (e.behavior == BehaviorKind::REQUEST_TELEOP || out.cost.contains(e.target)) continue;
      Label next{top.cost + e.cost, top.path, e.target};
      next.path.push_back(id);
      heap.push(std::move(next));
    }
    out.path[top.node] = std::move(top.path);
  }
  return out;
}

Plan plan_path(const GraphState& graph, NodeId from, NodeId to) {
  if (!graph.has_node(to)) throw UnknownNode("node " + std::to_string(to.value));
  const ShortestPaths sp = shortest_paths(graph, from);
  auto it = sp.cost.find(to);
  if (it == sp.cost.end()) {
    throw NoPath("no path from node " + std::to_string(from.value) + " to node " + std::to_string(to.value));
  }
  return Plan{from, to, sp.path.at(to), it->second};
}

std::optional<Job> select_job(const GraphState& graph, NodeId current, const RewardModel& rewards) {
  const ShortestPaths sp = shortest_paths(graph, current);
  std::optional<Job> best;
  for (const auto& [id, cost] : sp.cost) {
    const Node& n = graph.node(id);
    if (n.kind != NodeKind::FRONTIER) continue;
    const double r = rewards.reward(n);
    const double net = r - cost;
    if (!(net > 0.0)) continue;
    if (!best || net > best->net) best = Job{id, r, cost, net};
  }
  return best;
}

bool plan_valid(const GraphState& graph, const Plan& plan) {
  NodeId at = plan.start;
  if (!graph.has_node(plan.start) || !graph.has_node(plan.goal)) return false;
  for (EdgeId id : plan.edges) {
    const Edge* e = graph.find_edge(id);
    if (e == nullptr || e->source != at) return false;
    at = e->target;
  }
  return at == plan.goal;
}

TickResult planner_tick(const GraphState& graph, PlannerState state, const RewardModel& rewards) {
  TickResult out;
  if (state.level == AutonomyLevel::L3_OPERATOR_BEHAVIOR || state.level == AutonomyLevel::L4_TELEOP) {
    out.state = std::move(state);
    return out;
  }
  if (state.active_plan) {
    const Plan& p = *state.active_plan;
    if (!plan_valid(graph, p) || p.start != state.current) state.active_plan.reset();
  }
  if (state.active_plan && state.active_plan->edges.empty()) state.active_plan.reset();

  if (!state.active_plan) {
    if (state.level == AutonomyLevel::L1_FULL_AUTONOMY) {
      auto job = select_job(graph, state.current, rewards);
      if (!job) {
        out.decision = MissionComplete{};
        out.state = std::move(state);
        return out;
      }
      out.job = job;
      state.active_plan = plan_path(graph, state.current, job->target);
      out.plan = state.active_plan;
    } else {
      if (!state.operator_job) {
        out.state = std::move(state);
        return out;
      }
      if (*state.operator_job == state.current) {
        state.operator_job.reset();
        out.notifications.push_back("job reached");
        out.state = std::move(state);
        return out;
      }
      try {
        state.active_plan = plan_path(graph, state.current, *state.operator_job);
        out.plan = state.active_plan;
      } catch (const Error& e) {
        out.notifications.push_back(std::string("NoPath: ") + e.what());
        state.operator_job.reset();
        out.state = std::move(state);
        return out;
      }
    }
  }
  if (state.active_plan->edges.empty()) {
    state.active_plan.reset();
    if (state.level == AutonomyLevel::L2_OPERATOR_JOBS) state.operator_job.reset();
    out.state = std::move(state);
    return out;
  }
  out.decision = ExecuteEdge{state.active_plan->edges.front()};
  out.state = std::move(state);
  return out;
}

PlannerState replan_on_delta(PlannerState state, const std::vector<GraphDelta>& deltas) {
  if (!state.active_plan) return state;
  std::set<EdgeId> edges(state.active_plan->edges.begin(), state.active_plan->edges.end());
  for (const auto& d : deltas) {
    if (const auto* e = std::get_if<GraphDelta::EdgeRemoved>(&d.change)) {
      if (edges.contains(e->id)) {
        state.active_plan.reset();
        return state;
      }
    } else if (const auto* n = std::get_if<GraphDelta::NodeRemoved>(&d.change)) {
      if (n->id == state.active_plan->start || n->id == state.active_plan->goal) {
        state.active_plan.reset();
        return state;
      }
    }
  }
  return state;
}

}  // namespace bosg

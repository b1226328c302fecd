#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "bosg/graph.hpp"
#include "bosg/planner.hpp"

namespace bosg::testing {

inline WorldObject make_door(std::uint64_t id, Point2 at, DoorState state = DoorState::CLOSED) {
  WorldObject o;
  o.id = ObjectId{id};
  o.label = ObjectLabel::DOOR;
  o.pose.x = at.x;
  o.pose.y = at.y;
  o.state = state;
  return o;
}

inline WorldObject make_object(std::uint64_t id, ObjectLabel label, Point2 at) {
  WorldObject o;
  o.id = ObjectId{id};
  o.label = label;
  o.pose.x = at.x;
  o.pose.y = at.y;
  return o;
}

// Four waypoints in a row, a frontier hanging off v2, a container seen from v3
// and a closed door seen from v4 leading to v6 behind it.
struct Fig3 {
  SituationalGraph g;
  NodeId v1, v2, v3, v4, frontier, v6;
  EdgeId e12, e23, e34, e2f, teleop, open_door;

  Fig3() {
    v1 = g.add_node(Pose2(0, 0), NodeKind::WAYPOINT);
    v2 = g.add_node(Pose2(3, 0), NodeKind::WAYPOINT);
    v3 = g.add_node(Pose2(6, 0), NodeKind::WAYPOINT);
    v4 = g.add_node(Pose2(9, 0), NodeKind::WAYPOINT);
    frontier = g.add_node(Pose2(3, 3), NodeKind::FRONTIER);
    v6 = g.add_node(Pose2(12, 0), NodeKind::WAYPOINT);
    g.update_situation(v3, {}, {make_object(2, ObjectLabel::CONTAINER, {6, 1})});
    g.update_situation(v4, {}, {make_door(3, {10.5, 0})});
    e12 = g.add_edge(v1, v2, BehaviorKind::GOTO, {}, 3.0);
    e23 = g.add_edge(v2, v3, BehaviorKind::GOTO, {}, 3.0);
    e34 = g.add_edge(v3, v4, BehaviorKind::GOTO, {}, 3.0);
    e2f = g.add_edge(v2, frontier, BehaviorKind::GOTO, {}, 3.0);
    teleop = g.add_edge(v3, v3, BehaviorKind::REQUEST_TELEOP, {ObjectId{2}}, 100.0);
    open_door = g.add_edge(v4, v6, BehaviorKind::OPEN_DOOR, {ObjectId{3}}, 5.0);
  }
};

// Random multigraph for planner checks: up to 10 nodes, up to 3 parallel edges
// per ordered pair (a GOTO and up to two OPEN_DOOR edges with distinct doors),
// costs in hundredths on [0.1, 10].
struct RandomGraph {
  SituationalGraph g;
  std::vector<NodeId> nodes;
};

inline double random_cost(std::mt19937_64& rng) {
  return std::uniform_int_distribution<int>(10, 1000)(rng) / 100.0;
}

inline RandomGraph random_graph(std::mt19937_64& rng, double scale = 1.0,
                                const std::set<std::size_t>& frontier_positions = {}) {
  RandomGraph r;
  const int n = std::uniform_int_distribution<int>(2, 10)(rng);
  for (int i = 0; i < n; ++i) {
    const NodeKind kind = frontier_positions.contains(static_cast<std::size_t>(i)) && i != 0 ? NodeKind::FRONTIER
                                                                                            : NodeKind::WAYPOINT;
    r.nodes.push_back(r.g.add_node(Pose2(i, 0), kind));
  }
  // Objects live in the first node's situation so door parameters validate.
  r.g.update_situation(r.nodes[0], {},
                       {make_door(1, {0, 1}), make_door(2, {0, 2}), make_object(3, ObjectLabel::CONTAINER, {0, 3})});
  std::bernoulli_distribution coin(0.35);
  std::bernoulli_distribution rare(0.15);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(rng)) r.g.add_edge(r.nodes[i], r.nodes[j], BehaviorKind::GOTO, {}, random_cost(rng) * scale);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (std::uint64_t door = 1; door <= 2; ++door) {
        if (rare(rng)) {
          r.g.add_edge(r.nodes[i], r.nodes[j], BehaviorKind::OPEN_DOOR, {ObjectId{door}}, random_cost(rng) * scale);
        }
      }
    }
    if (r.g.node(r.nodes[i]).kind == NodeKind::WAYPOINT && rare(rng)) {
      r.g.add_edge(r.nodes[i], r.nodes[i], BehaviorKind::REQUEST_TELEOP, {ObjectId{3}}, 0.01);
    }
  }
  return r;
}

// Exhaustive enumeration of simple paths. Costs are summed left to right, the
// same order a path is walked.
struct ExhaustiveResult {
  bool found = false;
  double cost = std::numeric_limits<double>::infinity();
  std::vector<EdgeId> path;  // lexicographically smallest among the cheapest
};

inline ExhaustiveResult exhaustive_path(const GraphState& g, NodeId from, NodeId to) {
  ExhaustiveResult best;
  if (from == to) {
    best.found = true;
    best.cost = 0.0;
    return best;
  }
  // Adjacency built straight from the edge map, independent of the graph's own index.
  std::map<NodeId, std::vector<const Edge*>> adj;
  for (const auto& [id, e] : g.edges()) {
    if (e.behavior != BehaviorKind::REQUEST_TELEOP) adj[e.source].push_back(&e);
  }
  std::set<NodeId> on_path{from};
  std::vector<EdgeId> path;
  std::function<void(NodeId, double)> dfs = [&](NodeId at, double cost) {
    for (const Edge* ep : adj[at]) {
      const Edge& e = *ep;
      const EdgeId id = e.id;
      if (on_path.contains(e.target)) continue;
      const double c = cost + e.cost;
      path.push_back(id);
      if (e.target == to) {
        if (!best.found || c < best.cost || (c == best.cost && path < best.path)) {
          best.found = true;
          best.cost = c;
          best.path = path;
        }
      } else {
        on_path.insert(e.target);
        dfs(e.target, c);
        on_path.erase(e.target);
      }
      path.pop_back();
    }
  };
  dfs(from, 0.0);
  return best;
}

inline double walk_cost(const GraphState& g, const std::vector<EdgeId>& path) {
  double c = 0.0;
  for (EdgeId id : path) c += g.edge(id).cost;
  return c;
}

// Arbitrary graph with gridmaps, objects and all three edge kinds, for
// serialization checks.
inline GraphSnapshot random_snapshot(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  SituationalGraph g;
  const int n = 1 + static_cast<int>(rng() % 12);
  std::vector<NodeId> ids;
  std::uint64_t next_object = 1;
  for (int i = 0; i < n; ++i) {
    const bool frontier = i > 0 && rng() % 4 == 0;
    const NodeId id = g.add_node(Pose2(u(rng), u(rng), u(rng)), frontier ? NodeKind::FRONTIER : NodeKind::WAYPOINT);
    ids.push_back(id);
    if (frontier) continue;
    GridMap m(1 + static_cast<int>(rng() % 8), 1 + static_cast<int>(rng() % 8), 0.5, Pose2(u(rng), u(rng)));
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x) m.set({x, y}, static_cast<CellState>(rng() % 3));
    std::vector<WorldObject> objs;
    if (rng() % 2 == 0) {
      objs.push_back(make_door(next_object++, {u(rng), u(rng)}, rng() % 2 ? DoorState::OPEN : DoorState::CLOSED));
    }
    if (rng() % 2 == 0) objs.push_back(make_object(next_object++, ObjectLabel::CONTAINER, {u(rng), u(rng)}));
    g.update_situation(id, m, objs);
  }
  std::vector<ObjectId> doors, others;
  for (const auto& o : g.objects()) (o.label == ObjectLabel::DOOR ? doors : others).push_back(o.id);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng() % 3 == 0) g.add_edge(ids[i], ids[j], BehaviorKind::GOTO, {}, (rng() % 1000) / 7.0);
      if (!doors.empty() && rng() % 5 == 0) {
        g.add_edge(ids[i], ids[j], BehaviorKind::OPEN_DOOR, {doors[rng() % doors.size()]}, 5.0);
      }
    }
    if (!others.empty() && g.node(ids[i]).kind == NodeKind::WAYPOINT && rng() % 4 == 0) {
      g.add_edge(ids[i], ids[i], BehaviorKind::REQUEST_TELEOP, {others[rng() % others.size()]}, 100.0);
    }
  }
  return g.snapshot();
}


}  // namespace bosg::testing

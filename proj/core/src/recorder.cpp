#include "bosg/recorder.hpp"

#include <algorithm>
#include <cmath>

#include "bosg/errors.hpp"

namespace bosg {

void RecorderConfig::validate() const {
  if (!(node_spacing > 0.0) || frontier_min_cluster <= 0 || !(frontier_separation > 0.0) || !(prune_radius > 0.0) ||
      !(doorway_offset > 0.0) || !(robot_radius > 0.0) || !(arrival_tolerance > 0.0)) {
    throw InvariantViolation("recorder parameters must be positive");
  }
}

Recorder::Recorder(SituationalGraph& graph, GlobalView view, RecorderConfig config, CostModel costs)
    : graph_(graph), view_(std::move(view)), config_(config), costs_(costs) {
  config_.validate();
}

GlobalView Recorder::view_for(const WorldModel& world) {
  return GlobalView(world.width(), world.height(), world.resolution(), Pose2{});
}

std::vector<GraphDelta> Recorder::drain() { return graph_.take_deltas(); }

std::string_view Recorder::reason(NodeId id) const {
  auto it = reasons_.find(id);
  return it == reasons_.end() ? std::string_view{} : it->second;
}

std::optional<DoorState> Recorder::door_state(ObjectId door) const {
  auto it = doors_.find(door);
  if (it != doors_.end()) return it->second;
  if (const WorldObject* o = graph_.find_object(door)) return o->state;
  return std::nullopt;
}

bool Recorder::corridor_ok(Point2 a, Point2 b) const {
  return view_.segment_known_free(a, b) && view_.corridor_clear(a, b, config_.robot_radius);
}

bool Recorder::goto_possible(const Node& from, Point2 to) const { return corridor_ok(from.pose.position(), to); }

NodeId Recorder::add_node(const Pose2& pose, NodeKind kind, std::string_view reason) {
  const NodeId id = graph_.add_node(pose, kind, {}, reason);
  reasons_[id] = reason;
  return id;
}

void Recorder::add_goto(NodeId a, NodeId b) {
  if (a == b || graph_.find_matching(a, b, BehaviorKind::GOTO, {})) return;
  graph_.add_edge(a, b, BehaviorKind::GOTO, {}, distance(graph_.node(a).pose, graph_.node(b).pose));
}

std::optional<NodeId> Recorder::connect_waypoint(NodeId fresh, std::optional<NodeId> preferred) {
  const Point2 p = graph_.node(fresh).pose.position();
  if (preferred && *preferred != fresh && graph_.has_node(*preferred) &&
      goto_possible(graph_.node(*preferred), p)) {
    add_goto(*preferred, fresh);
    return preferred;
  }
  std::vector<std::pair<double, NodeId>> order;
  for (const auto& [id, n] : graph_.nodes()) {
    if (id == fresh || n.kind != NodeKind::WAYPOINT) continue;
    order.emplace_back(distance(n.pose.position(), p), id);
  }
  std::sort(order.begin(), order.end());
  for (const auto& [d, id] : order) {
    if (goto_possible(graph_.node(id), p)) {
      add_goto(id, fresh);
      return id;
    }
  }
  return std::nullopt;
}

std::optional<NodeId> Recorder::nearest_connectable(Point2 p) const {
  std::vector<std::pair<double, NodeId>> order;
  for (const auto& [id, n] : graph_.nodes()) {
    if (n.kind == NodeKind::WAYPOINT) order.emplace_back(distance(n.pose.position(), p), id);
  }
  std::sort(order.begin(), order.end());
  for (const auto& [d, id] : order) {
    if (goto_possible(graph_.node(id), p)) return id;
  }
  return std::nullopt;
}

std::optional<NodeId> Recorder::current_node() const {
  if (!have_pose_) return std::nullopt;
  auto nearest = graph_.nearest_node(robot_pose_, NodeKind::WAYPOINT);
  if (!nearest) return std::nullopt;
  return nearest->first;
}

std::optional<NodeId> Recorder::anchor_node() const {
  if (!have_pose_) return std::nullopt;
  std::vector<std::pair<double, NodeId>> order;
  for (const auto& [id, n] : graph_.nodes()) {
    if (n.kind == NodeKind::WAYPOINT) order.emplace_back(distance(n.pose, robot_pose_), id);
  }
  std::sort(order.begin(), order.end());
  for (const auto& [d, id] : order) {
    if (d == 0.0 || corridor_ok(robot_pose_.position(), graph_.node(id).pose.position())) return id;
  }
  return current_node();
}

void Recorder::validate_edges(const std::vector<CellIndex>& newly_occupied) {
  std::vector<EdgeId> doomed;
  for (const auto& [id, e] : graph_.edges()) {
    if (e.behavior == BehaviorKind::GOTO) {
      if (newly_occupied.empty() || e.source > e.target) continue;
      const Point2 a = graph_.node(e.source).pose.position();
      const Point2 b = graph_.node(e.target).pose.position();
      if (!view_.corridor_avoids(a, b, config_.robot_radius, newly_occupied)) doomed.push_back(id);
    } else if (e.behavior == BehaviorKind::OPEN_DOOR) {
      if (door_state(e.object_params.front()) == DoorState::OPEN) doomed.push_back(id);
    }
  }
  for (EdgeId id : doomed) {
    if (!graph_.has_edge(id)) continue;
    const Edge e = graph_.edge(id);
    graph_.remove_edge(id);
    // An open door is plain passage between the two places it joined.
    if (e.behavior == BehaviorKind::OPEN_DOOR && graph_.has_node(e.source) && graph_.has_node(e.target)) {
      add_goto(e.source, e.target);
    }
  }
}

std::vector<GraphDelta> Recorder::observe(std::span<const PerceptionEvent> events) {
  const GridMap* grid = nullptr;
  std::vector<WorldObject> detected;
  std::vector<ObjectId> door_changes;
  for (const auto& ev : events) {
    if (const auto* p = std::get_if<PerceptionEvent::PoseUpdate>(&ev.payload)) {
      robot_pose_ = p->pose;
      have_pose_ = true;
    } else if (const auto* g = std::get_if<PerceptionEvent::LocalGrid>(&ev.payload)) {
      grid = &g->gridmap;
    } else if (const auto* o = std::get_if<PerceptionEvent::ObjectDetected>(&ev.payload)) {
      detected.push_back(o->object);
      if (o->object.label == ObjectLabel::DOOR) doors_[o->object.id] = *o->object.state;
    } else if (const auto* d = std::get_if<PerceptionEvent::DoorStateChanged>(&ev.payload)) {
      doors_[d->door] = d->state;
      door_changes.push_back(d->door);
    }
  }

  std::vector<CellIndex> newly_occupied;
  if (grid != nullptr) newly_occupied = view_.merge(*grid);
  if (!have_pose_) return drain();

  if (graph_.empty()) {
    last_node_ = add_node(robot_pose_, NodeKind::WAYPOINT, node_reason::kStart);
  } else if (graph_.nearest_node(robot_pose_).second > config_.node_spacing) {
    const NodeId fresh = add_node(robot_pose_, NodeKind::WAYPOINT, node_reason::kSpacing);
    connect_waypoint(fresh, last_node_);
  }

  const auto [nearest, nearest_d] = graph_.nearest_node(robot_pose_);
  if (graph_.node(nearest).kind == NodeKind::FRONTIER && nearest_d <= config_.arrival_tolerance) {
    graph_.mark_visited(nearest);
    // Unknown cells still bordering a visited frontier cannot be seen from
    // there; keep them from spawning the same frontier again.
    exhaust_around(graph_.node(nearest).pose.position());
  }

  const NodeId cur = *current_node();
  const Node& node = graph_.node(cur);
  std::vector<WorldObject> objects = node.situation().objects;
  auto upsert = [&objects](const WorldObject& o) {
    auto it = std::find_if(objects.begin(), objects.end(), [&](const WorldObject& x) { return x.id == o.id; });
    if (it == objects.end()) {
      objects.push_back(o);
    } else {
      *it = o;
    }
  };
  for (const auto& o : detected) upsert(o);
  for (ObjectId door : door_changes) {
    if (const WorldObject* known = graph_.find_object(door)) upsert(*known);
  }
  for (auto& o : objects) {
    if (o.label == ObjectLabel::DOOR) o.state = doors_.contains(o.id) ? doors_.at(o.id) : o.state;
  }
  Situation next(grid != nullptr ? *grid : node.situation().gridmap, std::move(objects));
  if (!(next == node.situation())) graph_.update_situation(cur, std::move(next.gridmap), std::move(next.objects));
  last_node_ = cur;

  validate_edges(newly_occupied);
  return drain();
}

std::vector<GraphDelta> Recorder::apply_affordances(NodeId id) {
  const Node& node = graph_.node(id);
  if (node.kind != NodeKind::WAYPOINT || node.situation().empty()) return drain();
  const Situation situation = node.situation();
  const Pose2 here = node.pose;
  const GridMap& local = situation.gridmap;

  // H1: traversable ground in the local map that borders unknown space.
  if (!local.empty()) {
    auto free_in_local = [&](Point2 p) {
      const auto c = local.cell_of(p);
      return c && local.at(*c) == CellState::FREE;
    };
    for (const auto& cand : find_frontiers(view_, graph_, config_, exhausted_)) {
      const Point2 p = cand.pose.position();
      // The proximity rule would prune it straight away.
      if (have_pose_ && distance(robot_pose_.position(), p) < config_.node_spacing &&
          view_.line_of_sight(robot_pose_.position(), p)) {
        continue;
      }
      if (graph_.nearest_node(cand.pose).second < config_.frontier_separation) continue;
      std::optional<NodeId> from;
      if (free_in_local(p) && goto_possible(graph_.node(id), p)) {
        from = id;
      } else {
        from = nearest_connectable(p);
      }
      if (!from) continue;
      const NodeId f = add_node(cand.pose, NodeKind::FRONTIER, node_reason::kFrontier);
      add_goto(*from, f);
    }
    std::vector<NodeId> orphans;
    for (const auto& [fid, n] : graph_.nodes()) {
      if (n.kind == NodeKind::FRONTIER && graph_.in_edge_ids(fid).empty()) orphans.push_back(fid);
    }
    for (NodeId fid : orphans) {
      const Point2 p = graph_.node(fid).pose.position();
      if (free_in_local(p) && goto_possible(graph_.node(id), p)) add_goto(id, fid);
    }
  }

  for (const auto& o : situation.objects) {
    if (o.label == ObjectLabel::DOOR) {
      // H2: a closed door affords opening it, landing just past the doorway.
      if (door_state(o.id).value_or(DoorState::CLOSED) != DoorState::CLOSED) continue;
      const bool handled = std::any_of(graph_.edges().begin(), graph_.edges().end(), [&](const auto& kv) {
        return kv.second.behavior == BehaviorKind::OPEN_DOOR && kv.second.object_params.front() == o.id;
      });
      if (handled) continue;
      const Point2 door = o.pose.position();
      const double dx = door.x - here.x;
      const double dy = door.y - here.y;
      Point2 axis = std::abs(dx) >= std::abs(dy) ? Point2{dx >= 0 ? 1.0 : -1.0, 0.0}
                                                   : Point2{0.0, dy >= 0 ? 1.0 : -1.0};
      const double off = config_.doorway_offset;
      const Pose2 before(door.x - off * axis.x, door.y - off * axis.y, std::atan2(axis.y, axis.x));
      const Pose2 beyond(door.x + off * axis.x, door.y + off * axis.y, std::atan2(axis.y, axis.x));

      std::optional<NodeId> approach;
      for (const auto& [nid, n] : graph_.nodes()) {
        if (n.kind == NodeKind::WAYPOINT && distance(n.pose, before) <= config_.arrival_tolerance) {
          approach = nid;
          break;
        }
      }
      if (!approach) {
        if (!goto_possible(graph_.node(id), before.position())) {
          bool reachable = false;
          for (const auto& [nid, n] : graph_.nodes()) {
            if (n.kind == NodeKind::WAYPOINT && goto_possible(n, before.position())) {
              reachable = true;
              break;
            }
          }
          if (!reachable) continue;
        }
        approach = add_node(before, NodeKind::WAYPOINT, node_reason::kDoorApproach);
        connect_waypoint(*approach, id);
      }
      const NodeKind beyond_kind =
          view_.unknown_within(beyond.position(), config_.prune_radius) ? NodeKind::FRONTIER : NodeKind::WAYPOINT;
      const NodeId post = add_node(beyond, beyond_kind, node_reason::kDoorBeyond);
      graph_.add_edge(*approach, post, BehaviorKind::OPEN_DOOR, {o.id}, costs_.open_door);
    } else if (o.label == ObjectLabel::PERSON || o.label == ObjectLabel::CONTAINER) {
      // H3 / H4: a person or a container affords asking the operator for help.
      const bool requested = std::any_of(graph_.edges().begin(), graph_.edges().end(), [&](const auto& kv) {
        return kv.second.behavior == BehaviorKind::REQUEST_TELEOP && kv.second.object_params.front() == o.id;
      });
      if (!requested) graph_.add_edge(id, id, BehaviorKind::REQUEST_TELEOP, {o.id}, costs_.request_teleop);
    }
  }
  return drain();
}

bool Recorder::frontier_visible_from_robot(const Node& n) const {
  return have_pose_ && distance(n.pose, robot_pose_) < config_.node_spacing &&
         view_.line_of_sight(robot_pose_.position(), n.pose.position());
}

void Recorder::exhaust_around(Point2 p) {
  const CellIndex c = view_.grid().cell_of_unchecked(p);
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) exhausted_.insert({c.x + dx, c.y + dy});
  }
}

std::vector<GraphDelta> Recorder::prune_frontiers() {
  std::vector<NodeId> doomed;
  std::vector<NodeId> keep;
  for (const auto& [id, n] : graph_.nodes()) {
    if (n.kind != NodeKind::FRONTIER) continue;
    const bool near_robot = frontier_visible_from_robot(n);
    if (view_.unknown_within(n.pose.position(), config_.prune_radius) && !near_robot) continue;
    if (near_robot) exhaust_around(n.pose.position());
    // The landing spot past a door stays as a place in the graph; it is the
    // only foothold in the room behind it.
    if (reason(id) == node_reason::kDoorBeyond) {
      keep.push_back(id);
    } else {
      doomed.push_back(id);
    }
  }
  for (NodeId id : keep) graph_.mark_visited(id);
  for (NodeId id : doomed) graph_.remove_node(id);
  return drain();
}

std::vector<GraphDelta> Recorder::record(std::span<const PerceptionEvent> events) {
  std::vector<GraphDelta> out = observe(events);
  auto pruned = prune_frontiers();
  out.insert(out.end(), std::make_move_iterator(pruned.begin()), std::make_move_iterator(pruned.end()));
  if (auto cur = current_node()) {
    auto more = apply_affordances(*cur);
    out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  }
  return out;
}

std::vector<Pose2> Recorder::extract_frontiers() const {
  std::vector<Pose2> out;
  for (auto& c : find_frontiers(view_, graph_, config_, exhausted_)) out.push_back(c.pose);
  return out;
}

}  // namespace bosg

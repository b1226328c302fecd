#include "bosg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bosg/errors.hpp"

namespace bosg {

namespace {

const std::vector<EdgeId> kNoEdges;

std::string id_str(NodeId id) { return "node " + std::to_string(id.value); }
std::string id_str(EdgeId id) { return "edge " + std::to_string(id.value); }

void erase_id(std::vector<EdgeId>& v, EdgeId id) { std::erase(v, id); }

void normalize_params(std::vector<ObjectId>& params) {
  std::sort(params.begin(), params.end());
  params.erase(std::unique(params.begin(), params.end()), params.end());
}

}  // namespace

std::string_view to_string(ObjectLabel l) {
  switch (l) {
    case ObjectLabel::DOOR:
      return "DOOR";
    case ObjectLabel::CONTAINER:
      return "CONTAINER";
    case ObjectLabel::PERSON:
      return "PERSON";
    case ObjectLabel::FRONTIER:
      return "FRONTIER";
  }
  return "?";
}

std::string_view to_string(DoorState s) { return s == DoorState::OPEN ? "OPEN" : "CLOSED"; }

std::string_view to_string(NodeKind k) { return k == NodeKind::WAYPOINT ? "WAYPOINT" : "FRONTIER"; }

std::string_view to_string(BehaviorKind b) {
  switch (b) {
    case BehaviorKind::GOTO:
      return "GOTO";
    case BehaviorKind::OPEN_DOOR:
      return "OPEN_DOOR";
    case BehaviorKind::REQUEST_TELEOP:
      return "REQUEST_TELEOP";
  }
  return "?";
}

ObjectLabel object_label_from(std::string_view s) {
  if (s == "DOOR") return ObjectLabel::DOOR;
  if (s == "CONTAINER") return ObjectLabel::CONTAINER;
  if (s == "PERSON") return ObjectLabel::PERSON;
  if (s == "FRONTIER") return ObjectLabel::FRONTIER;
  throw InvariantViolation("unknown object label " + std::string(s));
}

DoorState door_state_from(std::string_view s) {
  if (s == "OPEN") return DoorState::OPEN;
  if (s == "CLOSED") return DoorState::CLOSED;
  throw InvariantViolation("unknown door state " + std::string(s));
}

NodeKind node_kind_from(std::string_view s) {
  if (s == "WAYPOINT") return NodeKind::WAYPOINT;
  if (s == "FRONTIER") return NodeKind::FRONTIER;
  throw InvariantViolation("unknown node kind " + std::string(s));
}

BehaviorKind behavior_from(std::string_view s) {
  if (s == "GOTO") return BehaviorKind::GOTO;
  if (s == "OPEN_DOOR") return BehaviorKind::OPEN_DOOR;
  if (s == "REQUEST_TELEOP") return BehaviorKind::REQUEST_TELEOP;
  throw InvariantViolation("unknown behavior " + std::string(s));
}

void validate_object(const WorldObject& o) {
  if (!o.pose.finite()) throw InvariantViolation("object pose must be finite");
  if (o.label == ObjectLabel::DOOR && !o.state) throw InvariantViolation("door without state");
  if (o.label != ObjectLabel::DOOR && o.state) throw InvariantViolation("non-door object with state");
}

Situation::Situation(GridMap g, std::vector<WorldObject> objs) : gridmap(std::move(g)) {
  // Last occurrence of an id wins.
  std::map<ObjectId, WorldObject> byid;
  for (auto& o : objs) {
    validate_object(o);
    byid.insert_or_assign(o.id, std::move(o));
  }
  objects.reserve(byid.size());
  for (auto& [id, o] : byid) objects.push_back(std::move(o));
}

const WorldObject* Situation::find(ObjectId id) const {
  auto it = std::lower_bound(objects.begin(), objects.end(), id,
                             [](const WorldObject& o, ObjectId v) { return o.id < v; });
  return it != objects.end() && it->id == id ? &*it : nullptr;
}

std::string_view GraphDelta::type() const {
  struct Visitor {
    std::string_view operator()(const NodeAdded&) const { return "node_added"; }
    std::string_view operator()(const NodeRemoved&) const { return "node_removed"; }
    std::string_view operator()(const EdgeAdded&) const { return "edge_added"; }
    std::string_view operator()(const EdgeRemoved&) const { return "edge_removed"; }
    std::string_view operator()(const SituationUpdated&) const { return "situation_updated"; }
  };
  return std::visit(Visitor{}, change);
}

// ---------------------------------------------------------------------------
// GraphState

const Node& GraphState::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownNode(id_str(id));
  return it->second;
}

const Edge& GraphState::edge(EdgeId id) const {
  auto it = edges_.find(id);
  if (it == edges_.end()) throw UnknownEdge(id_str(id));
  return it->second;
}

const Node* GraphState::find_node(NodeId id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const Edge* GraphState::find_edge(EdgeId id) const {
  auto it = edges_.find(id);
  return it == edges_.end() ? nullptr : &it->second;
}

const std::vector<EdgeId>& GraphState::out_edge_ids(NodeId id) const {
  if (!has_node(id)) throw UnknownNode(id_str(id));
  auto it = out_.find(id);
  return it == out_.end() ? kNoEdges : it->second;
}

const std::vector<EdgeId>& GraphState::in_edge_ids(NodeId id) const {
  if (!has_node(id)) throw UnknownNode(id_str(id));
  auto it = in_.find(id);
  return it == in_.end() ? kNoEdges : it->second;
}

std::vector<Edge> GraphState::out_edges(NodeId id) const {
  std::vector<Edge> out;
  for (EdgeId e : out_edge_ids(id)) out.push_back(edges_.at(e));
  return out;
}

std::pair<NodeId, double> GraphState::nearest_node(const Pose2& pose) const {
  if (nodes_.empty()) throw EmptyGraph("nearest_node on empty graph");
  NodeId best;
  double best_d = INFINITY;
  for (const auto& [id, n] : nodes_) {
    const double d = distance(n.pose, pose);
    if (d < best_d) {
      best_d = d;
      best = id;
    }
  }
  return {best, best_d};
}

std::optional<std::pair<NodeId, double>> GraphState::nearest_node(const Pose2& pose, NodeKind kind) const {
  std::optional<std::pair<NodeId, double>> best;
  for (const auto& [id, n] : nodes_) {
    if (n.kind != kind) continue;
    const double d = distance(n.pose, pose);
    if (!best || d < best->second) best = {id, d};
  }
  return best;
}

const WorldObject* GraphState::find_object(ObjectId id) const {
  auto it = objects_.find(id);
  return it == objects_.end() ? nullptr : &it->second.latest;
}

std::vector<WorldObject> GraphState::objects() const {
  std::vector<WorldObject> out;
  out.reserve(objects_.size());
  for (const auto& [id, e] : objects_) out.push_back(e.latest);
  return out;
}

std::optional<EdgeId> GraphState::find_matching(NodeId source, NodeId target, BehaviorKind b,
                                                const std::vector<ObjectId>& params) const {
  auto it = out_.find(source);
  if (it == out_.end()) return std::nullopt;
  for (EdgeId id : it->second) {
    const Edge& e = edges_.at(id);
    if (e.target == target && e.behavior == b && e.object_params == params) return id;
  }
  return std::nullopt;
}

std::optional<EdgeId> GraphState::reverse_of(const Edge& e) const {
  if (e.behavior != BehaviorKind::GOTO) return std::nullopt;
  return find_matching(e.target, e.source, BehaviorKind::GOTO, e.object_params);
}

std::size_t GraphState::count_nodes(NodeKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [kind](const auto& kv) { return kv.second.kind == kind; }));
}

void GraphState::index_edge(const Edge& e) {
  auto& out = out_[e.source];
  out.insert(std::upper_bound(out.begin(), out.end(), e.id), e.id);
  auto& in = in_[e.target];
  in.insert(std::upper_bound(in.begin(), in.end(), e.id), e.id);
}

void GraphState::unindex_edge(const Edge& e) {
  erase_id(out_[e.source], e.id);
  erase_id(in_[e.target], e.id);
}

void GraphState::ref_objects(const Situation& s) {
  for (const auto& o : s.objects) {
    auto& entry = objects_[o.id];
    entry.latest = o;
    ++entry.refs;
  }
}

void GraphState::unref_objects(const Situation& s) {
  for (const auto& o : s.objects) {
    auto it = objects_.find(o.id);
    if (it == objects_.end()) continue;
    if (--it->second.refs == 0) objects_.erase(it);
  }
}

void GraphState::check_invariants() const {
  std::map<NodeId, std::vector<EdgeId>> out;
  std::map<NodeId, std::vector<EdgeId>> in;
  for (const auto& [id, n] : nodes_) {
    if (n.id != id) throw InvariantViolation("node key mismatch");
    if (!n.pose.finite()) throw InvariantViolation("non-finite node pose");
    if (n.kind == NodeKind::FRONTIER &&
        (!n.situation().objects.empty() || !n.situation().gridmap.all(CellState::UNKNOWN))) {
      throw InvariantViolation("frontier " + id_str(id) + " carries observations");
    }
  }
  for (const auto& [id, e] : edges_) {
    if (e.id != id) throw InvariantViolation("edge key mismatch");
    if (!has_node(e.source) || !has_node(e.target)) throw InvariantViolation(id_str(id) + " has dangling endpoint");
    if (!(e.cost >= 0.0) || !std::isfinite(e.cost)) throw InvariantViolation(id_str(id) + " has invalid cost");
    if (e.behavior == BehaviorKind::GOTO) {
      auto rev = reverse_of(e);
      if (!rev || edges_.at(*rev).cost != e.cost) throw InvariantViolation(id_str(id) + " lacks GOTO partner");
    }
    auto match = find_matching(e.source, e.target, e.behavior, e.object_params);
    if (!match || *match != id) throw InvariantViolation(id_str(id) + " duplicated");
    out[e.source].push_back(id);
    in[e.target].push_back(id);
  }
  auto same = [](const std::map<NodeId, std::vector<EdgeId>>& expect,
                 const std::map<NodeId, std::vector<EdgeId>>& have) {
    for (const auto& [n, ids] : have) {
      auto it = expect.find(n);
      if (ids.empty() && it == expect.end()) continue;
      if (it == expect.end() || it->second != ids) return false;
    }
    for (const auto& [n, ids] : expect) {
      auto it = have.find(n);
      if (it == have.end() || it->second != ids) return false;
    }
    return true;
  };
  if (!same(out, out_) || !same(in, in_)) throw InvariantViolation("adjacency index out of sync");
}

// ---------------------------------------------------------------------------
// GraphSnapshot

GraphSnapshot GraphSnapshot::from_parts(std::uint64_t revision, std::vector<Node> nodes, std::vector<Edge> edges) {
  GraphSnapshot s;
  s.revision_ = revision;
  for (auto& n : nodes) {
    if (s.nodes_.contains(n.id)) throw InvariantViolation("duplicate " + id_str(n.id));
    for (const auto& o : n.situation().objects) validate_object(o);
    s.ref_objects(n.situation());
    s.next_node_ = std::max(s.next_node_, n.id.value + 1);
    s.nodes_.emplace(n.id, std::move(n));
  }
  for (auto& e : edges) {
    if (s.edges_.contains(e.id)) throw InvariantViolation("duplicate " + id_str(e.id));
    normalize_params(e.object_params);
    s.next_edge_ = std::max(s.next_edge_, e.id.value + 1);
    s.index_edge(e);
    s.edges_.emplace(e.id, std::move(e));
  }
  s.check_invariants();
  return s;
}

bool structurally_equal(const GraphState& a, const GraphState& b, bool compare_gridmaps) {
  if (a.revision() != b.revision() || a.edges() != b.edges() || a.node_count() != b.node_count()) return false;
  for (auto ia = a.nodes().begin(), ib = b.nodes().begin(); ia != a.nodes().end(); ++ia, ++ib) {
    const Node& x = ia->second;
    const Node& y = ib->second;
    if (x.id != y.id || x.pose != y.pose || x.kind != y.kind) return false;
    if (x.situation().objects != y.situation().objects) return false;
    if (compare_gridmaps && x.situation().gridmap != y.situation().gridmap) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// SituationalGraph

NodeId SituationalGraph::add_node(const Pose2& pose, NodeKind kind, Situation situation, std::string_view reason) {
  if (!pose.finite()) throw InvariantViolation("node pose must be finite");
  if (kind == NodeKind::FRONTIER && (!situation.objects.empty() || !situation.gridmap.all(CellState::UNKNOWN))) {
    throw InvariantViolation("frontier nodes start without observations");
  }
  Node n;
  n.id = NodeId{next_node_++};
  n.pose = pose;
  n.kind = kind;
  n.situation_ptr = std::make_shared<const Situation>(std::move(situation));
  bump();
  record(GraphDelta::NodeAdded{n, std::string(reason)});
  insert_node(std::move(n));
  return NodeId{next_node_ - 1};
}

void SituationalGraph::insert_node(Node n) {
  ref_objects(n.situation());
  const NodeId id = n.id;
  nodes_.insert_or_assign(id, std::move(n));
}

void SituationalGraph::validate_edge(NodeId source, NodeId target, BehaviorKind behavior,
                                     const std::vector<ObjectId>& params, double cost) const {
  if (!has_node(source)) throw UnknownNode(id_str(source));
  if (!has_node(target)) throw UnknownNode(id_str(target));
  if (!std::isfinite(cost) || cost < 0.0) throw InvariantViolation("edge cost must be finite and >= 0");
  switch (behavior) {
    case BehaviorKind::GOTO:
      if (!params.empty()) throw InvariantViolation("GOTO takes no object parameters");
      if (source == target) throw InvariantViolation("GOTO self-loop");
      break;
    case BehaviorKind::OPEN_DOOR: {
      if (params.size() != 1) throw InvariantViolation("OPEN_DOOR takes exactly one door");
      const WorldObject* door = find_object(params.front());
      if (door == nullptr || door->label != ObjectLabel::DOOR) {
        throw InvariantViolation("OPEN_DOOR parameter must be a known door");
      }
      break;
    }
    case BehaviorKind::REQUEST_TELEOP:
      if (source != target) throw InvariantViolation("REQUEST_TELEOP must be a self-loop");
      if (params.size() != 1) throw InvariantViolation("REQUEST_TELEOP takes exactly one object");
      break;
  }
}

void SituationalGraph::insert_edge(Edge e) {
  index_edge(e);
  const EdgeId id = e.id;
  edges_.insert_or_assign(id, std::move(e));
}

EdgeId SituationalGraph::add_edge(NodeId source, NodeId target, BehaviorKind behavior,
                                  std::vector<ObjectId> object_params, double cost) {
  normalize_params(object_params);
  validate_edge(source, target, behavior, object_params, cost);
  if (find_matching(source, target, behavior, object_params) ||
      (behavior == BehaviorKind::GOTO && find_matching(target, source, behavior, object_params))) {
    throw DuplicateEdge("edge " + std::to_string(source.value) + "->" + std::to_string(target.value) + " " +
                        std::string(to_string(behavior)) + " already exists");
  }
  bump();
  Edge fwd{EdgeId{next_edge_++}, source, target, behavior, object_params, cost};
  const EdgeId result = fwd.id;
  record(GraphDelta::EdgeAdded{fwd});
  insert_edge(std::move(fwd));
  if (behavior == BehaviorKind::GOTO) {
    Edge rev{EdgeId{next_edge_++}, target, source, behavior, std::move(object_params), cost};
    record(GraphDelta::EdgeAdded{rev});
    insert_edge(std::move(rev));
  }
  return result;
}

void SituationalGraph::erase_edge(EdgeId id) {
  auto it = edges_.find(id);
  unindex_edge(it->second);
  edges_.erase(it);
  record(GraphDelta::EdgeRemoved{id});
}

void SituationalGraph::remove_edge(EdgeId id) {
  const Edge* e = find_edge(id);
  if (e == nullptr) throw UnknownEdge(id_str(id));
  const auto rev = reverse_of(*e);
  bump();
  erase_edge(id);
  if (rev) erase_edge(*rev);
}

void SituationalGraph::remove_node(NodeId id) {
  const Node& n = node(id);
  bump();
  std::vector<EdgeId> incident = out_edge_ids(id);
  const auto& in = in_edge_ids(id);
  incident.insert(incident.end(), in.begin(), in.end());
  std::sort(incident.begin(), incident.end());
  incident.erase(std::unique(incident.begin(), incident.end()), incident.end());
  for (EdgeId e : incident) erase_edge(e);
  unref_objects(n.situation());
  nodes_.erase(id);
  out_.erase(id);
  in_.erase(id);
  record(GraphDelta::NodeRemoved{id});
}

void SituationalGraph::update_situation(NodeId id, GridMap gridmap, std::vector<WorldObject> objects) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownNode(id_str(id));
  Node& n = it->second;
  auto next = std::make_shared<const Situation>(std::move(gridmap), std::move(objects));
  if (n.kind == NodeKind::FRONTIER && !(next->objects.empty() && next->gridmap.all(CellState::UNKNOWN))) {
    throw InvariantViolation("frontier " + id_str(id) + " must be visited before it records observations");
  }
  bump();
  unref_objects(n.situation());
  n.situation_ptr = std::move(next);
  ref_objects(n.situation());
  record(GraphDelta::SituationUpdated{id, n.kind, n.situation_ptr});
}

void SituationalGraph::mark_visited(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownNode(id_str(id));
  if (it->second.kind == NodeKind::WAYPOINT) return;
  bump();
  it->second.kind = NodeKind::WAYPOINT;
  record(GraphDelta::SituationUpdated{id, NodeKind::WAYPOINT, it->second.situation_ptr});
}

void SituationalGraph::apply(const GraphDelta& delta) {
  struct Visitor {
    SituationalGraph& g;
    void operator()(const GraphDelta::NodeAdded& d) const {
      if (g.has_node(d.node.id)) throw InvariantViolation("replayed " + id_str(d.node.id) + " already exists");
      g.next_node_ = std::max(g.next_node_, d.node.id.value + 1);
      g.insert_node(d.node);
    }
    void operator()(const GraphDelta::NodeRemoved& d) const {
      const Node& n = g.node(d.id);
      if (!g.out_edge_ids(d.id).empty() || !g.in_edge_ids(d.id).empty()) {
        throw InvariantViolation("replayed removal of " + id_str(d.id) + " with live edges");
      }
      g.unref_objects(n.situation());
      g.nodes_.erase(d.id);
      g.out_.erase(d.id);
      g.in_.erase(d.id);
    }
    void operator()(const GraphDelta::EdgeAdded& d) const {
      if (g.has_edge(d.edge.id)) throw InvariantViolation("replayed " + id_str(d.edge.id) + " already exists");
      if (!g.has_node(d.edge.source) || !g.has_node(d.edge.target)) throw UnknownNode("replayed edge endpoint");
      g.next_edge_ = std::max(g.next_edge_, d.edge.id.value + 1);
      g.insert_edge(d.edge);
    }
    void operator()(const GraphDelta::EdgeRemoved& d) const {
      const Edge& e = g.edge(d.id);
      g.unindex_edge(e);
      g.edges_.erase(d.id);
    }
    void operator()(const GraphDelta::SituationUpdated& d) const {
      auto it = g.nodes_.find(d.id);
      if (it == g.nodes_.end()) throw UnknownNode(id_str(d.id));
      g.unref_objects(it->second.situation());
      it->second.kind = d.kind;
      it->second.situation_ptr = d.situation ? d.situation : std::make_shared<const Situation>();
      g.ref_objects(it->second.situation());
    }
  };
  std::visit(Visitor{*this}, delta.change);
  revision_ = delta.revision;
}

}  // namespace bosg

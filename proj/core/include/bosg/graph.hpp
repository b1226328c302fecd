#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "bosg/geometry.hpp"
#include "bosg/gridmap.hpp"
#include "bosg/ids.hpp"

namespace bosg {

enum class ObjectLabel { DOOR, CONTAINER, PERSON, FRONTIER };
enum class DoorState { OPEN, CLOSED };
enum class NodeKind { WAYPOINT, FRONTIER };
enum class BehaviorKind { GOTO, OPEN_DOOR, REQUEST_TELEOP };

std::string_view to_string(ObjectLabel l);
std::string_view to_string(DoorState s);
std::string_view to_string(NodeKind k);
std::string_view to_string(BehaviorKind b);
ObjectLabel object_label_from(std::string_view s);
DoorState door_state_from(std::string_view s);
NodeKind node_kind_from(std::string_view s);
BehaviorKind behavior_from(std::string_view s);

struct WorldObject {
  ObjectId id;
  ObjectLabel label = ObjectLabel::CONTAINER;
  Pose3 pose;
  std::optional<DoorState> state;  ///< set for doors only

  friend bool operator==(const WorldObject&, const WorldObject&) = default;
};

/// Throws InvariantViolation if a door lacks a state or a non-door carries one.
void validate_object(const WorldObject& o);

/// Local gridmap plus the objects observed at a place. Objects are kept sorted
/// by id with no duplicates.
struct Situation {
  GridMap gridmap;
  std::vector<WorldObject> objects;

  Situation() = default;
  Situation(GridMap g, std::vector<WorldObject> objs);

  const WorldObject* find(ObjectId id) const;
  bool empty() const { return gridmap.empty() && objects.empty(); }

  friend bool operator==(const Situation&, const Situation&) = default;
};

struct Node {
  NodeId id;
  Pose2 pose;
  NodeKind kind = NodeKind::WAYPOINT;
  std::shared_ptr<const Situation> situation_ptr = std::make_shared<const Situation>();

  const Situation& situation() const { return *situation_ptr; }

  friend bool operator==(const Node& a, const Node& b) {
    return a.id == b.id && a.pose == b.pose && a.kind == b.kind && a.situation() == b.situation();
  }
};

struct Edge {
  EdgeId id;
  NodeId source;
  NodeId target;
  BehaviorKind behavior = BehaviorKind::GOTO;
  std::vector<ObjectId> object_params;  ///< sorted, unique
  double cost = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Per-behavior edge weights. GOTO edges cost their Euclidean length.
struct CostModel {
  double open_door = 5.0;
  double request_teleop = 100.0;
};

/// One recorded change to the graph, tagged with the revision it produced.
struct GraphDelta {
  struct NodeAdded {
    Node node;
    std::string reason;  ///< why the node was created; may be empty
  };
  struct NodeRemoved {
    NodeId id;
  };
  struct EdgeAdded {
    Edge edge;
  };
  struct EdgeRemoved {
    EdgeId id;
  };
  struct SituationUpdated {
    NodeId id;
    NodeKind kind;
    std::shared_ptr<const Situation> situation;
  };
  using Change = std::variant<NodeAdded, NodeRemoved, EdgeAdded, EdgeRemoved, SituationUpdated>;

  std::uint64_t revision = 0;
  Change change;

  std::string_view type() const;
};

/// Read-only view of a situational graph. Shared by the live graph and by
/// snapshots.
class GraphState {
 public:
  std::uint64_t revision() const { return revision_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }

  const std::map<NodeId, Node>& nodes() const { return nodes_; }
  const std::map<EdgeId, Edge>& edges() const { return edges_; }

  bool has_node(NodeId id) const { return nodes_.contains(id); }
  bool has_edge(EdgeId id) const { return edges_.contains(id); }
  const Node& node(NodeId id) const;
  const Edge& edge(EdgeId id) const;
  const Node* find_node(NodeId id) const;
  const Edge* find_edge(EdgeId id) const;

  /// Edges leaving `id`, ordered by EdgeId.
  std::vector<Edge> out_edges(NodeId id) const;
  const std::vector<EdgeId>& out_edge_ids(NodeId id) const;
  /// Edges entering `id`, ordered by EdgeId.
  const std::vector<EdgeId>& in_edge_ids(NodeId id) const;

  /// Node closest to `pose` in the plane; ties go to the lowest id.
  std::pair<NodeId, double> nearest_node(const Pose2& pose) const;
  /// As above, restricted to nodes of `kind`. nullopt if there are none.
  std::optional<std::pair<NodeId, double>> nearest_node(const Pose2& pose, NodeKind kind) const;

  /// Latest view of each object referenced by some node situation.
  const WorldObject* find_object(ObjectId id) const;
  std::vector<WorldObject> objects() const;

  /// The GOTO edge running opposite to `e`, if any.
  std::optional<EdgeId> reverse_of(const Edge& e) const;
  /// Existing edge with the same (source, target, behavior, params), if any.
  std::optional<EdgeId> find_matching(NodeId source, NodeId target, BehaviorKind b,
                                      const std::vector<ObjectId>& params) const;

  /// Checks every structural invariant; throws InvariantViolation on failure.
  void check_invariants() const;

  std::size_t count_nodes(NodeKind kind) const;

 protected:
  struct ObjectEntry {
    WorldObject latest;
    std::size_t refs = 0;
  };

  std::uint64_t revision_ = 0;
  std::map<NodeId, Node> nodes_;
  std::map<EdgeId, Edge> edges_;
  std::map<NodeId, std::vector<EdgeId>> out_;
  std::map<NodeId, std::vector<EdgeId>> in_;
  std::map<ObjectId, ObjectEntry> objects_;
  std::uint64_t next_node_ = 1;
  std::uint64_t next_edge_ = 1;

  void index_edge(const Edge& e);
  void unindex_edge(const Edge& e);
  void ref_objects(const Situation& s);
  void unref_objects(const Situation& s);
};

/// Immutable copy of the graph taken at a revision.
class GraphSnapshot : public GraphState {
 public:
  GraphSnapshot() = default;
  explicit GraphSnapshot(const GraphState& s) : GraphState(s) {}

  /// Rebuilds a snapshot from explicit parts; validates all invariants.
  static GraphSnapshot from_parts(std::uint64_t revision, std::vector<Node> nodes, std::vector<Edge> edges);
};

/// Structural equality: revision, nodes (pose, kind, objects) and edges.
/// Gridmaps participate only when `compare_gridmaps` is set.
bool structurally_equal(const GraphState& a, const GraphState& b, bool compare_gridmaps = true);

/// The behavior-oriented situational graph. Single writer; readers that run
/// concurrently must go through snapshot().
class SituationalGraph : public GraphState {
 public:
  SituationalGraph() = default;
  /// Resumes from a snapshot, e.g. one received before a stream of deltas.
  explicit SituationalGraph(const GraphState& s) : GraphState(s) {}

  NodeId add_node(const Pose2& pose, NodeKind kind, Situation situation = {}, std::string_view reason = {});

  /// Adds an edge. GOTO inserts a directed pair sharing the cost; the returned
  /// id is the source->target half.
  EdgeId add_edge(NodeId source, NodeId target, BehaviorKind behavior, std::vector<ObjectId> object_params,
                  double cost);

  /// Removes an edge; GOTO removes its reverse partner too.
  void remove_edge(EdgeId id);

  /// Removes a node with every incident edge.
  void remove_node(NodeId id);

  /// Replaces the node's situation. Duplicate object ids in `objects` keep the
  /// last occurrence.
  void update_situation(NodeId id, GridMap gridmap, std::vector<WorldObject> objects);

  /// First visit of a frontier turns it into a waypoint.
  void mark_visited(NodeId id);

  GraphSnapshot snapshot() const { return GraphSnapshot(*this); }

  /// Re-applies a recorded delta, keeping its ids and revision. Used by replay.
  void apply(const GraphDelta& delta);

  /// Deltas recorded since the last call.
  std::vector<GraphDelta> take_deltas() { return std::exchange(journal_, {}); }
  const std::vector<GraphDelta>& pending_deltas() const { return journal_; }

 private:
  std::vector<GraphDelta> journal_;

  void bump() { ++revision_; }
  void record(GraphDelta::Change change) { journal_.push_back({revision_, std::move(change)}); }
  void erase_edge(EdgeId id);
  void insert_node(Node n);
  void insert_edge(Edge e);
  void validate_edge(NodeId source, NodeId target, BehaviorKind behavior,
                     const std::vector<ObjectId>& params, double cost) const;
};

}  // namespace bosg

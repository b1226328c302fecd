#pragma once

#include <optional>
#include <set>
#include <span>
#include <vector>

#include "bosg/global_view.hpp"
#include "bosg/graph.hpp"
#include "bosg/world.hpp"

namespace bosg {

struct RecorderConfig {
  double node_spacing = 2.0;       ///< a place is new beyond this distance from every node
  int frontier_min_cluster = 3;    ///< cells
  double frontier_separation = 1.0;
  double prune_radius = 0.5;
  double doorway_offset = 1.0;
  double robot_radius = 0.3;       ///< corridor half-width for GOTO validity
  double arrival_tolerance = 0.3;  ///< a frontier this close to the robot counts as visited

  void validate() const;
};

enum class AffordanceRule { H1_FRONTIER, H2_DOOR, H3_PERSON, H4_CONTAINER };

/// A cluster of frontier cells and the pose sampled for it.
struct FrontierCandidate {
  Pose2 pose;
  CellIndex cell;
  std::vector<CellIndex> cells;
};

/// FREE cells with a 4-neighbour UNKNOWN cell, clustered by 8-connectivity.
/// Clusters below the minimum size are dropped, as are candidates within
/// `frontier_separation` of an existing node. Ordered by cluster size
/// (descending), then x, then y.
std::vector<FrontierCandidate> find_frontiers(const GlobalView& view, const GraphState& graph,
                                              const RecorderConfig& config,
                                              const std::set<CellIndex>& excluded = {});

std::vector<Pose2> extract_frontiers(const GlobalView& view, const GraphState& graph, const RecorderConfig& config);

/// Why the recorder created a node. Carried in the node_added delta.
namespace node_reason {
inline constexpr std::string_view kStart = "start";
inline constexpr std::string_view kSpacing = "spacing";
inline constexpr std::string_view kFrontier = "frontier";
inline constexpr std::string_view kDoorApproach = "door_approach";
inline constexpr std::string_view kDoorBeyond = "door_beyond";
}  // namespace node_reason

/// Observer and prediction modules: folds perception into the graph, applies
/// the affordance rules and keeps frontier nodes current. Sole graph writer.
class Recorder {
 public:
  Recorder(SituationalGraph& graph, GlobalView view, RecorderConfig config, CostModel costs = {});

  /// Sized and aligned to the lattice of `world`.
  static GlobalView view_for(const WorldModel& world);

  std::vector<GraphDelta> observe(std::span<const PerceptionEvent> events);
  std::vector<GraphDelta> apply_affordances(NodeId node);
  std::vector<GraphDelta> prune_frontiers();

  /// One recording cycle: observe, prune, affordances at the current node.
  std::vector<GraphDelta> record(std::span<const PerceptionEvent> events);

  std::vector<Pose2> extract_frontiers() const;

  /// Waypoint nearest to the robot, if any.
  std::optional<NodeId> current_node() const;
  /// Nearest waypoint reachable from the robot by a clear straight corridor.
  std::optional<NodeId> anchor_node() const;

  const Pose2& robot_pose() const { return robot_pose_; }
  const GlobalView& view() const { return view_; }
  const RecorderConfig& config() const { return config_; }
  const SituationalGraph& graph() const { return graph_; }
  std::optional<DoorState> door_state(ObjectId door) const;
  const std::set<CellIndex>& exhausted_cells() const { return exhausted_; }

  /// Node creation reasons, by node id.
  std::string_view reason(NodeId id) const;

 private:
  bool corridor_ok(Point2 a, Point2 b) const;
  bool goto_possible(const Node& from, Point2 to) const;
  /// Nearest waypoint with a clear straight corridor to `p`.
  std::optional<NodeId> nearest_connectable(Point2 p) const;
  std::optional<NodeId> connect_waypoint(NodeId fresh, std::optional<NodeId> preferred);
  NodeId add_node(const Pose2& pose, NodeKind kind, std::string_view reason);
  void add_goto(NodeId a, NodeId b);
  bool frontier_visible_from_robot(const Node& n) const;
  void exhaust_around(Point2 p);
  void validate_edges(const std::vector<CellIndex>& newly_occupied);
  std::vector<GraphDelta> drain();

  SituationalGraph& graph_;
  GlobalView view_;
  RecorderConfig config_;
  CostModel costs_;
  Pose2 robot_pose_;
  bool have_pose_ = false;
  std::optional<NodeId> last_node_;
  std::map<ObjectId, DoorState> doors_;
  std::set<CellIndex> exhausted_;
  std::map<NodeId, std::string_view> reasons_;
};

}  // namespace bosg

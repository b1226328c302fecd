#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bosg/graph.hpp"
#include "bosg/planner.hpp"
#include "bosg/world.hpp"

namespace bosg {

enum class OutcomeStatus { SUCCEEDED, FAILED, PREEMPTED };
std::string_view to_string(OutcomeStatus s);

struct BehaviorOutcome {
  EdgeId edge;
  OutcomeStatus status = OutcomeStatus::SUCCEEDED;
  std::uint64_t steps_taken = 0;
  std::string detail;
};

struct ExecutorConfig {
  double dt = 0.1;
  double arrival_tolerance = 0.3;
  double source_tolerance = 1.0;  ///< GOTO starts only this close to its source node
  double door_reach = 1.5;        ///< OPEN_DOOR starts only this close to the door
  int stall_steps = 20;           ///< no progress over this many steps fails a traversal
  double stall_distance = 0.05;
  int door_delay_steps = 20;      ///< simulated manipulation time
};

/// How a pending teleoperation request ended.
enum class TeleopResolution { RELEASED, LEVEL_CHANGED };

/// A behavior in flight. The mission loop advances it once per simulation step.
class RunningBehavior {
 public:
  enum class Kind { TRAVERSE, OPEN_DOOR, TELEOP };

  /// Checks preconditions against the current world and graph. Throws
  /// WrongBehavior, NotAtSource, TooFarFromDoor or DoorMissing.
  static RunningBehavior start(const WorldModel& world, const GraphState& graph, const Edge& edge,
                               const ExecutorConfig& config = {});

  /// Drive straight to `target` without a graph edge (repositioning onto a node).
  static RunningBehavior reposition(const Pose2& target, const ExecutorConfig& config = {});

  const Edge& edge() const { return edge_; }
  Kind kind() const { return kind_; }
  /// True when this behavior steps the world itself; a pending teleop request
  /// leaves motion to the operator.
  bool drives_robot() const { return kind_ != Kind::TELEOP; }
  std::uint64_t steps_taken() const { return steps_; }

  /// Advances one step. May step the world once and may append perception
  /// events (door state changes) to `emitted`. Returns the outcome when done.
  std::optional<BehaviorOutcome> tick(WorldModel& world, std::vector<PerceptionEvent>& emitted);

  /// Teleop request resolved by the operator.
  BehaviorOutcome resolve(TeleopResolution how);

  BehaviorOutcome preempt(const std::string& reason);

 private:
  RunningBehavior(Kind kind, Edge edge, Pose2 target, ExecutorConfig config)
      : kind_(kind), edge_(std::move(edge)), target_(target), config_(config) {}

  BehaviorOutcome finish(OutcomeStatus s, std::string detail) const { return {edge_.id, s, steps_, std::move(detail)}; }
  bool arrived(const WorldModel& world) const;

  Kind kind_;
  Edge edge_;
  Pose2 target_;
  ExecutorConfig config_;
  std::uint64_t steps_ = 0;
  int delay_left_ = 0;
  bool door_opened_ = false;
  Point2 progress_anchor_{};
  int stall_count_ = 0;
  bool started_motion_ = false;
};

/// Called after every simulation step of a blocking execution, e.g. to sense
/// and record. Receives events emitted by the behavior itself.
using StepHook = std::function<void(WorldModel&, const std::vector<PerceptionEvent>&)>;
/// Polled once per waiting step with the wait so far.
using TeleopSession = std::function<std::optional<TeleopResolution>(std::uint64_t waited)>;

BehaviorOutcome execute_goto(WorldModel& world, const Edge& edge, const GraphState& graph,
                             const ExecutorConfig& config = {}, const StepHook& hook = {});
BehaviorOutcome execute_open_door(WorldModel& world, const Edge& edge, const GraphState& graph,
                                  const ExecutorConfig& config = {}, const StepHook& hook = {});
BehaviorOutcome execute_request_teleop(const Edge& edge, const TeleopSession& session);

/// Runs a plan edge by edge, stopping at the first failure. `graph` is read
/// again before each edge; `between` runs after each edge completes (the
/// recording cycle). Throws StalePlan when a later edge has vanished.
std::vector<BehaviorOutcome> execute_plan(WorldModel& world, const Plan& plan, const SituationalGraph& graph,
                                          const TeleopSession& session, const ExecutorConfig& config = {},
                                          const StepHook& hook = {}, const std::function<void()>& between = {});

}  // namespace bosg

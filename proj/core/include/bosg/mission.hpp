#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bosg/events.hpp"
#include "bosg/executor.hpp"
#include "bosg/planner.hpp"
#include "bosg/recorder.hpp"
#include "bosg/world.hpp"

namespace bosg {

/// When an automatically raised teleop request interrupts the running behavior.
enum class TeleopInterrupt { IMMEDIATE, AFTER_EDGE };

struct ScheduledCommand {
  std::uint64_t step = 0;
  OperatorCommand command;
};

struct MissionConfig {
  std::string scenario_path;
  std::string scenario_text;  ///< used instead of the file when non-empty
  std::uint64_t seed = 0;
  AutonomyLevel level = AutonomyLevel::L1_FULL_AUTONOMY;
  std::uint64_t step_limit = 10000;
  std::string log_path;       ///< no log when empty
  SensorConfig sensor;
  RecorderConfig recorder;
  CostModel costs;
  ExecutorConfig executor;
  double frontier_reward = 50.0;
  /// At L1, switch to teleop whenever the recorder adds a REQUEST_TELEOP edge.
  bool teleop_policy_hook = false;
  TeleopInterrupt teleop_interrupt = TeleopInterrupt::AFTER_EDGE;
  std::vector<ScheduledCommand> commands;

  /// Canonical JSON of everything that influences a run, for the log digest.
  json to_json() const;
};

/// Reads the optional JSON config file format; unknown keys are rejected.
MissionConfig mission_config_from_json(const json& j, MissionConfig base = {});

enum class MissionStatus { RUNNING, COMPLETE, STEP_LIMIT };

struct MissionSummary {
  MissionStatus status = MissionStatus::RUNNING;
  std::uint64_t steps = 0;
  double coverage = 0.0;  ///< observed fraction of reachable floor cells
  std::size_t frontiers_remaining = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::uint64_t revision = 0;
};

/// The mission loop: world, recorder, planner and executor wired together.
/// `step()` runs one iteration; commands may be submitted from other threads.
class Mission {
 public:
  using EventSink = std::function<void(const MissionEvent&)>;

  explicit Mission(MissionConfig config);

  /// Queues an operator command for the next step. `origin` is echoed in the
  /// rejection notification so a server can answer the right client.
  void submit(OperatorCommand command, std::optional<std::uint64_t> origin = std::nullopt);

  MissionStatus step();
  MissionSummary run();

  /// Receives every event after it is logged, on the stepping thread.
  void set_event_sink(EventSink sink) { sink_ = std::move(sink); }

  /// Serializes access to mission state against a concurrent `step()`.
  std::mutex& mutex() const { return mutex_; }

  MissionStatus status() const { return status_; }
  MissionSummary summary() const;
  const MissionConfig& config() const { return config_; }
  const WorldModel& world() const { return world_; }
  const SituationalGraph& graph() const { return graph_; }
  const Recorder& recorder() const { return *recorder_; }
  AutonomyLevel level() const { return planner_.level; }
  const PlannerState& planner_state() const { return planner_; }
  bool paused() const { return paused_; }
  bool behavior_running() const { return running_.has_value(); }
  /// Node the robot is considered to be at; edges start here.
  std::optional<NodeId> current() const;
  std::uint64_t next_seq() const { return seq_; }

 private:
  struct Queued {
    OperatorCommand command;
    std::optional<std::uint64_t> origin;
  };

  void emit(EventKind kind, json payload);
  void notify(json payload) { emit(EventKind::NOTIFICATION, std::move(payload)); }
  void reject(const Queued& q, const std::string& reason);
  void apply(const Queued& q);
  void change_level(AutonomyLevel level, const std::string& reason);
  void finish_behavior(const BehaviorOutcome& outcome);
  void record(const std::vector<PerceptionEvent>& events);
  void decide();
  void start_edge(const Edge& edge, bool from_plan);
  std::size_t frontier_count() const;

  MissionConfig config_;
  WorldModel world_;
  SituationalGraph graph_;
  std::unique_ptr<Recorder> recorder_;
  RewardModel rewards_;
  PlannerState planner_;
  EventLogWriter log_;
  EventSink sink_;
  mutable std::mutex mutex_;
  std::mutex queue_mutex_;
  std::deque<Queued> queue_;
  std::size_t script_pos_ = 0;

  std::uint64_t seq_ = 0;
  MissionStatus status_ = MissionStatus::RUNNING;
  bool paused_ = false;
  std::optional<RunningBehavior> running_;
  bool running_from_plan_ = false;
  bool running_detached_ = false;
  mutable std::optional<NodeId> current_;
  std::optional<EdgeId> operator_edge_;
  std::optional<Teleop> teleop_;
  std::optional<AutonomyLevel> level_before_teleop_;
  std::deque<EdgeId> pending_teleop_;
  std::vector<PerceptionEvent> carried_;
  bool last_idle_ = false;
  bool return_to_source_ = false;
  std::vector<CellIndex> reachable_;
};

std::string_view to_string(MissionStatus s);

/// Runs a mission to completion or the step limit.
MissionSummary run_mission(const MissionConfig& config);

}  // namespace bosg

#include "bosg/executor.hpp"

#include "bosg/errors.hpp"

namespace bosg {

std::string_view to_string(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::SUCCEEDED:
      return "SUCCEEDED";
    case OutcomeStatus::FAILED:
      return "FAILED";
    case OutcomeStatus::PREEMPTED:
      return "PREEMPTED";
  }
  return "?";
}

RunningBehavior RunningBehavior::start(const WorldModel& world, const GraphState& graph, const Edge& edge,
                                       const ExecutorConfig& config) {
  const Pose2& robot = world.robot().pose;
  switch (edge.behavior) {
    case BehaviorKind::GOTO: {
      const Node& source = graph.node(edge.source);
      if (distance(robot, source.pose) > config.source_tolerance) {
        throw NotAtSource("robot is " + std::to_string(distance(robot, source.pose)) + " m from node " +
                          std::to_string(edge.source.value));
      }
      return RunningBehavior(Kind::TRAVERSE, edge, graph.node(edge.target).pose, config);
    }
    case BehaviorKind::OPEN_DOOR: {
      const WorldObject* door = graph.find_object(edge.object_params.front());
      if (door == nullptr) throw DoorMissing("door " + std::to_string(edge.object_params.front().value));
      if (distance(robot.position(), door->pose.position()) > config.door_reach) {
        throw TooFarFromDoor("robot is " + std::to_string(distance(robot.position(), door->pose.position())) +
                             " m from door " + std::to_string(door->id.value));
      }
      RunningBehavior b(Kind::OPEN_DOOR, edge, graph.node(edge.target).pose, config);
      auto it = world.doors().find(door->id);
      const bool already_open = it != world.doors().end() && it->second.state == DoorState::OPEN;
      b.delay_left_ = already_open ? 0 : config.door_delay_steps;
      b.door_opened_ = already_open;
      return b;
    }
    case BehaviorKind::REQUEST_TELEOP:
      return RunningBehavior(Kind::TELEOP, edge, robot, config);
  }
  throw WrongBehavior("unknown behavior");
}

RunningBehavior RunningBehavior::reposition(const Pose2& target, const ExecutorConfig& config) {
  return RunningBehavior(Kind::TRAVERSE, Edge{}, target, config);
}

bool RunningBehavior::arrived(const WorldModel& world) const {
  return distance(world.robot().pose, target_) <= config_.arrival_tolerance;
}

std::optional<BehaviorOutcome> RunningBehavior::tick(WorldModel& world, std::vector<PerceptionEvent>& emitted) {
  if (kind_ == Kind::TELEOP) {
    ++steps_;
    return std::nullopt;
  }
  if (kind_ == Kind::OPEN_DOOR && !door_opened_) {
    if (delay_left_ > 0) {
      --delay_left_;
      world.step(VelocityCommand{}, config_.dt);
      ++steps_;
      return std::nullopt;
    }
    emitted.push_back(world.set_door(edge_.object_params.front(), DoorState::OPEN));
    door_opened_ = true;
  }
  if (arrived(world)) {
    return finish(OutcomeStatus::SUCCEEDED, door_opened_ && kind_ == Kind::OPEN_DOOR ? "door open" : "arrived");
  }
  if (!started_motion_) {
    started_motion_ = true;
    progress_anchor_ = world.robot().pose.position();
    stall_count_ = 0;
  }
  world.step(WaypointCommand{target_}, config_.dt);
  ++steps_;
  if (arrived(world)) return finish(OutcomeStatus::SUCCEEDED, kind_ == Kind::OPEN_DOOR ? "door open" : "arrived");
  const Point2 now = world.robot().pose.position();
  if (distance(now, progress_anchor_) > config_.stall_distance) {
    progress_anchor_ = now;
    stall_count_ = 0;
  } else if (++stall_count_ >= config_.stall_steps) {
    return finish(OutcomeStatus::FAILED, "no progress");
  }
  return std::nullopt;
}

BehaviorOutcome RunningBehavior::resolve(TeleopResolution how) {
  if (kind_ != Kind::TELEOP) throw WrongBehavior("only a teleop request can be resolved");
  return how == TeleopResolution::RELEASED ? finish(OutcomeStatus::SUCCEEDED, "released by operator")
                                           : finish(OutcomeStatus::PREEMPTED, "autonomy level changed");
}

BehaviorOutcome RunningBehavior::preempt(const std::string& reason) { return finish(OutcomeStatus::PREEMPTED, reason); }

namespace {

BehaviorOutcome run_to_completion(WorldModel& world, RunningBehavior b, const StepHook& hook) {
  std::vector<PerceptionEvent> emitted;
  while (true) {
    emitted.clear();
    const auto before = world.step_index();
    auto outcome = b.tick(world, emitted);
    if (hook && (world.step_index() != before || !emitted.empty())) hook(world, emitted);
    if (outcome) return *outcome;
  }
}

void require(const Edge& edge, BehaviorKind kind) {
  if (edge.behavior != kind) {
    throw WrongBehavior("edge " + std::to_string(edge.id.value) + " is " + std::string(to_string(edge.behavior)) +
                        ", expected " + std::string(to_string(kind)));
  }
}

}  // namespace

BehaviorOutcome execute_goto(WorldModel& world, const Edge& edge, const GraphState& graph,
                             const ExecutorConfig& config, const StepHook& hook) {
  require(edge, BehaviorKind::GOTO);
  return run_to_completion(world, RunningBehavior::start(world, graph, edge, config), hook);
}

BehaviorOutcome execute_open_door(WorldModel& world, const Edge& edge, const GraphState& graph,
                                  const ExecutorConfig& config, const StepHook& hook) {
  require(edge, BehaviorKind::OPEN_DOOR);
  return run_to_completion(world, RunningBehavior::start(world, graph, edge, config), hook);
}

BehaviorOutcome execute_request_teleop(const Edge& edge, const TeleopSession& session) {
  require(edge, BehaviorKind::REQUEST_TELEOP);
  std::uint64_t waited = 0;
  while (true) {
    if (auto r = session(waited)) {
      return r == TeleopResolution::RELEASED
                 ? BehaviorOutcome{edge.id, OutcomeStatus::SUCCEEDED, waited, "released by operator"}
                 : BehaviorOutcome{edge.id, OutcomeStatus::PREEMPTED, waited, "autonomy level changed"};
    }
    ++waited;
  }
}

std::vector<BehaviorOutcome> execute_plan(WorldModel& world, const Plan& plan, const SituationalGraph& graph,
                                          const TeleopSession& session, const ExecutorConfig& config,
                                          const StepHook& hook, const std::function<void()>& between) {
  std::vector<BehaviorOutcome> outcomes;
  for (std::size_t i = 0; i < plan.edges.size(); ++i) {
    const Edge* edge = graph.find_edge(plan.edges[i]);
    if (edge == nullptr) {
      throw StalePlan("plan edge " + std::to_string(plan.edges[i].value) + " no longer exists at revision " +
                      std::to_string(graph.revision()));
    }
    BehaviorOutcome out;
    switch (edge->behavior) {
      case BehaviorKind::GOTO:
        out = execute_goto(world, *edge, graph, config, hook);
        break;
      case BehaviorKind::OPEN_DOOR:
        out = execute_open_door(world, *edge, graph, config, hook);
        break;
      case BehaviorKind::REQUEST_TELEOP:
        out = execute_request_teleop(*edge, session);
        break;
    }
    outcomes.push_back(out);
    if (out.status != OutcomeStatus::SUCCEEDED) break;
    if (between) between();
  }
  return outcomes;
}

}  // namespace bosg

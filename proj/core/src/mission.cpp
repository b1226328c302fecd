#include "bosg/mission.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "bosg/errors.hpp"

namespace bosg {

std::string_view to_string(MissionStatus s) {
  switch (s) {
    case MissionStatus::RUNNING:
      return "running";
    case MissionStatus::COMPLETE:
      return "mission_complete";
    case MissionStatus::STEP_LIMIT:
      return "step_limit";
  }
  return "?";
}

namespace {

std::string scenario_text_of(const MissionConfig& c) {
  if (!c.scenario_text.empty()) return c.scenario_text;
  std::ifstream in(c.scenario_path, std::ios::binary);
  if (!in) throw ScenarioError("cannot read scenario " + c.scenario_path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || key == k;
    if (!ok) throw InvariantViolation("unknown config key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json outcome_json(const BehaviorOutcome& o) {
  json j = {{"type", "behavior_outcome"},
            {"edge", nullptr},
            {"status", to_string(o.status)},
            {"steps_taken", o.steps_taken},
            {"detail", o.detail}};
  if (o.edge.value != 0) j["edge"] = o.edge.value;
  return j;
}

}  // namespace

json MissionConfig::to_json() const {
  json cmds = json::array();
  for (const auto& c : commands) cmds.push_back({{"step", c.step}, {"command", bosg::to_json(c.command)}});
  return {
      {"scenario_digest", hex64(fnv1a64(scenario_text_of(*this)))},
      {"seed", seed},
      {"autonomy", to_int(level)},
      {"steps", step_limit},
      {"sensor",
       {{"lidar_rays", sensor.lidar_rays},
        {"lidar_range", sensor.lidar_range},
        {"detector_range", sensor.detector_range},
        {"detector_fov", sensor.detector_fov},
        {"detection_noise", sensor.detection_noise}}},
      {"recorder",
       {{"node_spacing", recorder.node_spacing},
        {"frontier_min_cluster", recorder.frontier_min_cluster},
        {"frontier_separation", recorder.frontier_separation},
        {"prune_radius", recorder.prune_radius},
        {"doorway_offset", recorder.doorway_offset},
        {"arrival_tolerance", recorder.arrival_tolerance}}},
      {"costs", {{"open_door", costs.open_door}, {"request_teleop", costs.request_teleop}}},
      {"executor",
       {{"dt", executor.dt},
        {"arrival_tolerance", executor.arrival_tolerance},
        {"source_tolerance", executor.source_tolerance},
        {"door_reach", executor.door_reach},
        {"stall_steps", executor.stall_steps},
        {"stall_distance", executor.stall_distance},
        {"door_delay_steps", executor.door_delay_steps}}},
      {"frontier_reward", frontier_reward},
      {"teleop_policy_hook", teleop_policy_hook},
      {"teleop_interrupt", teleop_interrupt == TeleopInterrupt::IMMEDIATE ? "immediate" : "after_edge"},
      {"commands", cmds},
  };
}

MissionConfig mission_config_from_json(const json& j, MissionConfig c) {
  if (!j.is_object()) throw InvariantViolation("config must be a JSON object");
  reject_unknown_keys(j,
                      {"scenario", "seed", "autonomy", "steps", "log", "sensor", "recorder", "costs", "executor",
                       "frontier_reward", "teleop_policy_hook", "teleop_interrupt", "commands"},
                      "config");
  read(j, "scenario", c.scenario_path);
  read(j, "seed", c.seed);
  if (j.contains("autonomy")) c.level = autonomy_from_int(j.at("autonomy").get<int>());
  read(j, "steps", c.step_limit);
  read(j, "log", c.log_path);
  if (j.contains("sensor")) {
    const json& s = j.at("sensor");
    reject_unknown_keys(s, {"lidar_rays", "lidar_range", "detector_range", "detector_fov", "detection_noise"},
                        "sensor");
    read(s, "lidar_rays", c.sensor.lidar_rays);
    read(s, "lidar_range", c.sensor.lidar_range);
    read(s, "detector_range", c.sensor.detector_range);
    read(s, "detector_fov", c.sensor.detector_fov);
    read(s, "detection_noise", c.sensor.detection_noise);
  }
  if (j.contains("recorder")) {
    const json& r = j.at("recorder");
    reject_unknown_keys(r,
                        {"node_spacing", "frontier_min_cluster", "frontier_separation", "prune_radius",
                         "doorway_offset", "arrival_tolerance"},
                        "recorder");
    read(r, "node_spacing", c.recorder.node_spacing);
    read(r, "frontier_min_cluster", c.recorder.frontier_min_cluster);
    read(r, "frontier_separation", c.recorder.frontier_separation);
    read(r, "prune_radius", c.recorder.prune_radius);
    read(r, "doorway_offset", c.recorder.doorway_offset);
    read(r, "arrival_tolerance", c.recorder.arrival_tolerance);
  }
  if (j.contains("costs")) {
    const json& k = j.at("costs");
    reject_unknown_keys(k, {"open_door", "request_teleop"}, "costs");
    read(k, "open_door", c.costs.open_door);
    read(k, "request_teleop", c.costs.request_teleop);
  }
  if (j.contains("executor")) {
    const json& e = j.at("executor");
    reject_unknown_keys(e,
                        {"dt", "arrival_tolerance", "source_tolerance", "door_reach", "stall_steps",
                         "stall_distance", "door_delay_steps"},
                        "executor");
    read(e, "dt", c.executor.dt);
    read(e, "arrival_tolerance", c.executor.arrival_tolerance);
    read(e, "source_tolerance", c.executor.source_tolerance);
    read(e, "door_reach", c.executor.door_reach);
    read(e, "stall_steps", c.executor.stall_steps);
    read(e, "stall_distance", c.executor.stall_distance);
    read(e, "door_delay_steps", c.executor.door_delay_steps);
  }
  read(j, "frontier_reward", c.frontier_reward);
  read(j, "teleop_policy_hook", c.teleop_policy_hook);
  if (j.contains("teleop_interrupt")) {
    const auto v = j.at("teleop_interrupt").get<std::string>();
    if (v == "immediate") {
      c.teleop_interrupt = TeleopInterrupt::IMMEDIATE;
    } else if (v == "after_edge") {
      c.teleop_interrupt = TeleopInterrupt::AFTER_EDGE;
    } else {
      throw InvariantViolation("teleop_interrupt must be 'immediate' or 'after_edge'");
    }
  }
  if (j.contains("commands")) {
    c.commands.clear();
    for (const auto& entry : j.at("commands")) {
      c.commands.push_back({entry.at("step").get<std::uint64_t>(), command_from_json(entry.at("command"))});
    }
  }
  return c;
}

Mission::Mission(MissionConfig config) : config_(std::move(config)) {
  config_.sensor.validate();
  if (!(config_.executor.dt > 0.0)) throw InvariantViolation("dt must be positive");
  world_ = load_scenario(scenario_text_of(config_), config_.seed);
  config_.recorder.robot_radius = world_.robot().radius;
  recorder_ = std::make_unique<Recorder>(graph_, Recorder::view_for(world_), config_.recorder, config_.costs);
  rewards_.frontier_reward = config_.frontier_reward;
  planner_.level = config_.level;
  std::stable_sort(config_.commands.begin(), config_.commands.end(),
                   [](const ScheduledCommand& a, const ScheduledCommand& b) { return a.step < b.step; });
  reachable_ = world_.reachable_cells();
  if (!config_.log_path.empty()) {
    json header = {{"type", "header"},
                   {"config_digest", hex64(fnv1a64(config_.to_json().dump()))},
                   {"scenario_name", world_.name()},
                   {"seed", config_.seed}};
    log_ = EventLogWriter(config_.log_path, header);
  }
}

void Mission::submit(OperatorCommand command, std::optional<std::uint64_t> origin) {
  std::lock_guard lock(queue_mutex_);
  queue_.push_back({std::move(command), origin});
}

void Mission::emit(EventKind kind, json payload) {
  MissionEvent e{seq_++, world_.step_index(), kind, std::move(payload)};
  log_.write(e);
  if (sink_) sink_(e);
}

void Mission::reject(const Queued& q, const std::string& reason) {
  json n = {{"type", "command_rejected"}, {"command", to_json(q.command).at("type")}, {"reason", reason}};
  if (q.origin) n["origin"] = *q.origin;
  notify(std::move(n));
}

std::optional<NodeId> Mission::current() const {
  if (current_ && graph_.has_node(*current_) &&
      distance(graph_.node(*current_).pose, world_.robot().pose) <= config_.executor.source_tolerance) {
    return current_;
  }
  current_ = recorder_->anchor_node();
  return current_;
}

void Mission::change_level(AutonomyLevel level, const std::string& reason) {
  const AutonomyLevel previous = planner_.level;
  planner_.level = level;
  if (level != previous) {
    planner_.active_plan.reset();
    if (level != AutonomyLevel::L2_OPERATOR_JOBS) planner_.operator_job.reset();
    if (level != AutonomyLevel::L1_FULL_AUTONOMY) pending_teleop_.clear();
    operator_edge_.reset();
    teleop_.reset();
  }
  emit(EventKind::AUTONOMY_CHANGED, {{"level", to_int(level)}, {"previous", to_int(previous)}, {"reason", reason}});
}

void Mission::finish_behavior(const BehaviorOutcome& outcome) {
  emit(EventKind::BEHAVIOR_OUTCOME, outcome_json(outcome));
  const Edge edge = running_->edge();
  const bool from_plan = running_from_plan_;
  running_.reset();
  running_from_plan_ = false;
  running_detached_ = false;
  if (edge.id.value == 0) return;
  if (outcome.status == OutcomeStatus::SUCCEEDED) {
    if (graph_.has_node(edge.target)) current_ = edge.target;
    if (from_plan && planner_.active_plan && !planner_.active_plan->edges.empty() &&
        planner_.active_plan->edges.front() == edge.id) {
      Plan& p = *planner_.active_plan;
      p.edges.erase(p.edges.begin());
      p.start = edge.target;
      p.total_cost -= edge.cost;
      if (p.edges.empty()) planner_.active_plan.reset();
    }
  } else if (from_plan) {
    planner_.active_plan.reset();
    // Retrying from wherever the robot stopped tends to fail the same way, so
    // the next attempt starts from the source node itself.
    if (outcome.status == OutcomeStatus::FAILED && graph_.has_node(edge.source)) {
      current_ = edge.source;
      return_to_source_ = true;
    }
  }
}

void Mission::apply(const Queued& q) {
  const AutonomyLevel level = planner_.level;
  struct Check {
    const Mission& m;
    AutonomyLevel level;
    std::optional<std::string> operator()(const SetAutonomy&) const { return std::nullopt; }
    std::optional<std::string> operator()(const AllocateJob& c) const {
      if (level != AutonomyLevel::L2_OPERATOR_JOBS) return "requires level 2";
      if (!m.graph_.has_node(c.node)) return "unknown node " + std::to_string(c.node.value);
      return std::nullopt;
    }
    std::optional<std::string> operator()(const ExecuteBehavior& c) const {
      if (level != AutonomyLevel::L3_OPERATOR_BEHAVIOR) return "requires level 3";
      const Edge* e = m.graph_.find_edge(c.edge);
      if (e == nullptr) return "unknown edge " + std::to_string(c.edge.value);
      if (m.running_ || m.operator_edge_) return "a behavior is already running";
      if (e->source != m.current()) return "edge does not start at the current node";
      return std::nullopt;
    }
    std::optional<std::string> operator()(const Teleop& c) const {
      if (level != AutonomyLevel::L4_TELEOP) return "requires level 4";
      if (!std::isfinite(c.vx) || !std::isfinite(c.vy) || !std::isfinite(c.wz)) return "velocity must be finite";
      return std::nullopt;
    }
    std::optional<std::string> operator()(const ReleaseTeleop&) const {
      if (!m.running_ || m.running_->kind() != RunningBehavior::Kind::TELEOP) return "no teleop request pending";
      return std::nullopt;
    }
    std::optional<std::string> operator()(const Pause&) const { return std::nullopt; }
    std::optional<std::string> operator()(const Resume&) const { return std::nullopt; }
  };
  const auto rejection = std::visit(Check{*this, level}, q.command);

  json record = {{"command", to_json(q.command)}, {"accepted", !rejection}};
  if (q.origin) record["origin"] = *q.origin;
  emit(EventKind::COMMAND, std::move(record));
  if (rejection) {
    reject(q, *rejection);
    return;
  }

  const bool teleop_pending = running_ && running_->kind() == RunningBehavior::Kind::TELEOP;
  if (const auto* c = std::get_if<SetAutonomy>(&q.command)) {
    if (teleop_pending && c->level != AutonomyLevel::L4_TELEOP) {
      finish_behavior(running_->resolve(TeleopResolution::LEVEL_CHANGED));
      level_before_teleop_.reset();
    } else if (running_ && !teleop_pending && c->level != level) {
      finish_behavior(running_->preempt("autonomy level changed"));
    }
    change_level(c->level, "operator");
  } else if (const auto* c = std::get_if<AllocateJob>(&q.command)) {
    planner_.operator_job = c->node;
    planner_.active_plan.reset();
  } else if (const auto* c = std::get_if<ExecuteBehavior>(&q.command)) {
    operator_edge_ = c->edge;
  } else if (const auto* c = std::get_if<Teleop>(&q.command)) {
    teleop_ = *c;
  } else if (std::holds_alternative<ReleaseTeleop>(q.command)) {
    finish_behavior(running_->resolve(TeleopResolution::RELEASED));
    const AutonomyLevel back = level_before_teleop_.value_or(AutonomyLevel::L1_FULL_AUTONOMY);
    level_before_teleop_.reset();
    if (back != planner_.level) change_level(back, "teleop_released");
  } else if (std::holds_alternative<Pause>(q.command)) {
    paused_ = true;
  } else if (std::holds_alternative<Resume>(q.command)) {
    paused_ = false;
  }
}

void Mission::record(const std::vector<PerceptionEvent>& events) {
  const auto deltas = recorder_->record(events);
  for (const auto& d : deltas) {
    emit(EventKind::GRAPH_DELTA, to_json(d));
    const auto* added = std::get_if<GraphDelta::EdgeAdded>(&d.change);
    if (added == nullptr || added->edge.behavior != BehaviorKind::REQUEST_TELEOP) continue;
    const Edge& e = added->edge;
    json n = {{"type", "teleop_request"}, {"edge", e.id.value}, {"node", e.source.value}};
    if (const WorldObject* o = graph_.find_object(e.object_params.front())) {
      n["object"] = o->id.value;
      n["label"] = to_string(o->label);
    }
    notify(std::move(n));
    if (config_.teleop_policy_hook && planner_.level == AutonomyLevel::L1_FULL_AUTONOMY) {
      pending_teleop_.push_back(e.id);
      if (config_.teleop_interrupt == TeleopInterrupt::IMMEDIATE && running_) {
        finish_behavior(running_->preempt("teleop request"));
      }
    }
  }
  planner_ = replan_on_delta(std::move(planner_), deltas);
  if (running_ && !running_detached_ && running_->edge().id.value != 0 && !graph_.has_edge(running_->edge().id)) {
    // A frontier that became known while the robot drove toward it still
    // marks a good place to look from, so the traversal carries on to its
    // pose. A GOTO invalidated by a new obstacle is abandoned.
    const NodeId target = running_->edge().target;
    const bool target_explored = std::any_of(deltas.begin(), deltas.end(), [&](const GraphDelta& d) {
      const auto* r = std::get_if<GraphDelta::NodeRemoved>(&d.change);
      return r != nullptr && r->id == target;
    });
    if (target_explored && running_->kind() == RunningBehavior::Kind::TRAVERSE) {
      running_detached_ = true;
    } else {
      finish_behavior(running_->preempt("edge removed"));
    }
  }
}

void Mission::start_edge(const Edge& edge, bool from_plan) {
  try {
    running_ = RunningBehavior::start(world_, graph_, edge, config_.executor);
    running_from_plan_ = from_plan;
  } catch (const Error& e) {
    emit(EventKind::BEHAVIOR_OUTCOME, outcome_json({edge.id, OutcomeStatus::FAILED, 0, e.what()}));
    if (from_plan) planner_.active_plan.reset();
    return;
  }
  if (running_->kind() == RunningBehavior::Kind::TELEOP) {
    level_before_teleop_ = planner_.level;
    change_level(AutonomyLevel::L4_TELEOP, "teleop_request");
  }
}

void Mission::decide() {
  const auto cur = current();
  if (!cur) return;
  const AutonomyLevel level = planner_.level;

  if (level == AutonomyLevel::L3_OPERATOR_BEHAVIOR) {
    if (!operator_edge_) return;
    const EdgeId id = *operator_edge_;
    operator_edge_.reset();
    const Edge* e = graph_.find_edge(id);
    if (e == nullptr) {
      emit(EventKind::BEHAVIOR_OUTCOME, outcome_json({id, OutcomeStatus::FAILED, 0, "edge no longer exists"}));
      return;
    }
    emit(EventKind::DECISION, {{"type", "execute_edge"}, {"edge", id.value}, {"source", "operator"}});
    last_idle_ = false;
    start_edge(*e, false);
    return;
  }
  if (level == AutonomyLevel::L4_TELEOP) return;

  if (level == AutonomyLevel::L1_FULL_AUTONOMY) {
    while (!pending_teleop_.empty()) {
      const EdgeId id = pending_teleop_.front();
      pending_teleop_.pop_front();
      if (const Edge* e = graph_.find_edge(id)) {
        emit(EventKind::DECISION, {{"type", "execute_edge"}, {"edge", id.value}, {"source", "teleop_hook"}});
        last_idle_ = false;
        start_edge(*e, false);
        return;
      }
    }
  }

  const Node& node = graph_.node(*cur);
  const double tolerance =
      return_to_source_ ? config_.executor.arrival_tolerance : config_.executor.source_tolerance;
  return_to_source_ = false;
  if (distance(node.pose, world_.robot().pose) > tolerance) {
    emit(EventKind::DECISION, {{"type", "reposition"}, {"node", cur->value}});
    last_idle_ = false;
    running_ = RunningBehavior::reposition(node.pose, config_.executor);
    running_from_plan_ = false;
    return;
  }

  planner_.current = *cur;
  TickResult r = planner_tick(graph_, std::move(planner_), rewards_);
  planner_ = std::move(r.state);
  if (r.job) {
    emit(EventKind::DECISION, {{"type", "job_selected"},
                               {"target", r.job->target.value},
                               {"reward", r.job->reward},
                               {"cost", r.job->cost},
                               {"net", r.job->net}});
  }
  if (r.plan) emit(EventKind::PLAN, to_json(*r.plan));
  for (const auto& msg : r.notifications) notify({{"type", "planner"}, {"message", msg}});

  if (const auto* x = std::get_if<ExecuteEdge>(&r.decision)) {
    emit(EventKind::DECISION, {{"type", "execute_edge"}, {"edge", x->edge.value}, {"source", "planner"}});
    last_idle_ = false;
    start_edge(graph_.edge(x->edge), true);
  } else if (std::holds_alternative<MissionComplete>(r.decision)) {
    emit(EventKind::DECISION, {{"type", "mission_complete"}});
    status_ = MissionStatus::COMPLETE;
    const MissionSummary s = summary();
    emit(EventKind::MISSION_COMPLETE, {{"steps", s.steps},
                                       {"coverage", s.coverage},
                                       {"frontiers_remaining", s.frontiers_remaining},
                                       {"revision", s.revision},
                                       {"nodes", s.nodes},
                                       {"edges", s.edges}});
  } else if (!last_idle_) {
    emit(EventKind::DECISION, {{"type", "idle"}});
    last_idle_ = true;
  }
}

MissionStatus Mission::step() {
  std::lock_guard lock(mutex_);
  if (status_ != MissionStatus::RUNNING) return status_;

  const std::uint64_t k = world_.step_index();
  while (script_pos_ < config_.commands.size() && config_.commands[script_pos_].step <= k) {
    apply({config_.commands[script_pos_].command, std::nullopt});
    ++script_pos_;
  }
  std::deque<Queued> incoming;
  {
    std::lock_guard q(queue_mutex_);
    incoming.swap(queue_);
  }
  for (const auto& q : incoming) apply(q);

  if (!paused_) {
    std::vector<PerceptionEvent> events = std::move(carried_);
    carried_.clear();
    for (auto& ev : world_.sense(config_.sensor)) {
      emit(EventKind::PERCEPTION, to_json(ev));
      events.push_back(std::move(ev));
    }
    record(events);
    if (!running_) decide();
    if (status_ == MissionStatus::COMPLETE) {
      log_.flush();
      return status_;
    }
  }

  bool stepped = false;
  if (!paused_ && running_) {
    std::vector<PerceptionEvent> emitted;
    const auto before = world_.step_index();
    auto outcome = running_->tick(world_, emitted);
    stepped = world_.step_index() != before;
    for (auto& ev : emitted) {
      emit(EventKind::PERCEPTION, to_json(ev));
      carried_.push_back(std::move(ev));
    }
    if (outcome) finish_behavior(*outcome);
  }
  if (!stepped) {
    VelocityCommand v;
    if (!paused_ && teleop_ && planner_.level == AutonomyLevel::L4_TELEOP) v = {teleop_->vx, teleop_->vy, teleop_->wz};
    world_.step(v, config_.executor.dt);
  }
  teleop_.reset();

  if (world_.step_index() >= config_.step_limit) {
    status_ = MissionStatus::STEP_LIMIT;
    notify({{"type", "step_limit"}, {"steps", world_.step_index()}});
    log_.flush();
  }
  return status_;
}

MissionSummary Mission::run() {
  while (step() == MissionStatus::RUNNING) {
  }
  return summary();
}

std::size_t Mission::frontier_count() const { return graph_.count_nodes(NodeKind::FRONTIER); }

MissionSummary Mission::summary() const {
  MissionSummary s;
  s.status = status_;
  s.steps = world_.step_index();
  std::size_t seen = 0;
  for (CellIndex c : reachable_) {
    if (recorder_->view().at(c) != CellState::UNKNOWN) ++seen;
  }
  s.coverage = reachable_.empty() ? 1.0 : static_cast<double>(seen) / static_cast<double>(reachable_.size());
  s.frontiers_remaining = frontier_count();
  s.nodes = graph_.nodes().size();
  s.edges = graph_.edges().size();
  s.revision = graph_.revision();
  return s;
}

MissionSummary run_mission(const MissionConfig& config) {
  Mission m(config);
  return m.run();
}

}  // namespace bosg

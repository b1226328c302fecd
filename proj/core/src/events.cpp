#include "bosg/events.hpp"

#include <sstream>

#include "bosg/errors.hpp"

namespace bosg {

namespace {

constexpr std::pair<EventKind, std::string_view> kKinds[] = {
    {EventKind::PERCEPTION, "perception"},
    {EventKind::GRAPH_DELTA, "graph_delta"},
    {EventKind::PLAN, "plan"},
    {EventKind::DECISION, "decision"},
    {EventKind::BEHAVIOR_OUTCOME, "behavior_outcome"},
    {EventKind::COMMAND, "command"},
    {EventKind::AUTONOMY_CHANGED, "autonomy_changed"},
    {EventKind::NOTIFICATION, "notification"},
    {EventKind::MISSION_COMPLETE, "mission_complete"},
};

}  // namespace

std::string_view to_string(EventKind k) {
  for (const auto& [kind, name] : kKinds) {
    if (kind == k) return name;
  }
  return "?";
}

EventKind event_kind_from(std::string_view s) {
  for (const auto& [kind, name] : kKinds) {
    if (name == s) return kind;
  }
  throw InvariantViolation("unknown event kind " + std::string(s));
}

json MissionEvent::to_json() const {
  return {{"seq", seq}, {"step", step}, {"kind", to_string(kind)}, {"payload", payload}};
}

MissionEvent MissionEvent::from_json(const json& j) {
  MissionEvent e;
  e.seq = j.at("seq").get<std::uint64_t>();
  e.step = j.at("step").get<std::uint64_t>();
  e.kind = event_kind_from(j.at("kind").get<std::string>());
  e.payload = j.at("payload");
  return e;
}

json to_json(const OperatorCommand& c) {
  struct Visitor {
    json operator()(const SetAutonomy& x) const { return {{"type", "set_autonomy"}, {"level", to_int(x.level)}}; }
    json operator()(const AllocateJob& x) const { return {{"type", "allocate_job"}, {"node", x.node.value}}; }
    json operator()(const ExecuteBehavior& x) const {
      return {{"type", "execute_behavior"}, {"edge", x.edge.value}};
    }
    json operator()(const Teleop& x) const { return {{"type", "teleop"}, {"vx", x.vx}, {"vy", x.vy}, {"wz", x.wz}}; }
    json operator()(const ReleaseTeleop&) const { return {{"type", "release_teleop"}}; }
    json operator()(const Pause&) const { return {{"type", "pause"}}; }
    json operator()(const Resume&) const { return {{"type", "resume"}}; }
  };
  return std::visit(Visitor{}, c);
}

OperatorCommand command_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw InvariantViolation("command must be an object with a string 'type'");
  }
  const auto type = j.at("type").get<std::string>();
  auto number = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) throw InvariantViolation(type + " needs numeric '" + key + "'");
    return j.at(key).get<double>();
  };
  auto id = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_unsigned()) {
      throw InvariantViolation(type + " needs an id '" + key + "'");
    }
    return j.at(key).get<std::uint64_t>();
  };
  if (type == "set_autonomy") {
    if (!j.contains("level") || !j.at("level").is_number_integer()) {
      throw InvariantViolation("set_autonomy needs integer 'level'");
    }
    return SetAutonomy{autonomy_from_int(j.at("level").get<int>())};
  }
  if (type == "allocate_job") return AllocateJob{NodeId{id("node")}};
  if (type == "execute_behavior") return ExecuteBehavior{EdgeId{id("edge")}};
  if (type == "teleop") return Teleop{number("vx"), number("vy"), number("wz")};
  if (type == "release_teleop") return ReleaseTeleop{};
  if (type == "pause") return Pause{};
  if (type == "resume") return Resume{};
  throw InvariantViolation("unknown command type '" + type + "'");
}

json to_json(const PerceptionEvent& e) {
  struct Visitor {
    json operator()(const PerceptionEvent::PoseUpdate& x) const {
      return {{"type", "pose_update"}, {"pose", to_json(x.pose)}};
    }
    json operator()(const PerceptionEvent::LocalGrid& x) const {
      return {{"type", "local_grid"}, {"gridmap", to_json(x.gridmap)}};
    }
    json operator()(const PerceptionEvent::ObjectDetected& x) const {
      return {{"type", "object_detected"}, {"object", to_json(x.object)}};
    }
    json operator()(const PerceptionEvent::DoorStateChanged& x) const {
      return {{"type", "door_state_changed"}, {"door", x.door.value}, {"state", to_string(x.state)}};
    }
  };
  return std::visit(Visitor{}, e.payload);
}

json to_json(const Plan& p) {
  json edges = json::array();
  for (EdgeId e : p.edges) edges.push_back(e.value);
  return {{"start", p.start.value}, {"goal", p.goal.value}, {"edges", edges}, {"total_cost", p.total_cost}};
}

json to_json(const Job& j) {
  return {{"target", j.target.value}, {"reward", j.reward}, {"cost", j.cost}, {"net", j.net}};
}

json to_json(const RobotState& r) {
  return {{"pose", to_json(r.pose)}, {"radius", r.radius}, {"max_speed", r.max_speed}, {"max_yaw_rate", r.max_yaw_rate}};
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

EventLogWriter::EventLogWriter(const std::string& path, const json& header) : out_(path, std::ios::binary), path_(path) {
  if (!out_) throw LogWriteError("cannot open log " + path);
  out_ << header.dump() << '\n';
  if (!out_) throw LogWriteError("cannot write log " + path);
}

void EventLogWriter::write(const MissionEvent& e) {
  if (!out_.is_open()) return;
  out_ << e.to_json().dump() << '\n';
  if (!out_) throw LogWriteError("cannot write log " + path_);
}

void EventLogWriter::flush() {
  if (out_.is_open()) out_.flush();
}

EventLog parse_event_log(std::string_view text) {
  EventLog log;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    const bool terminated = nl != std::string_view::npos;
    text.remove_prefix(terminated ? nl + 1 : text.size());
    if (line.empty()) {
      if (terminated) continue;
      break;
    }
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw CorruptLog(line_no, e.what());
    }
    if (line_no == 1 && j.is_object() && j.value("type", "") == "header") {
      log.header = std::move(j);
      continue;
    }
    try {
      MissionEvent ev = MissionEvent::from_json(j);
      if (!log.events.empty() && ev.seq <= log.events.back().seq) throw CorruptLog(line_no, "seq not increasing");
      log.events.push_back(std::move(ev));
    } catch (const CorruptLog&) {
      throw;
    } catch (const std::exception& e) {
      throw CorruptLog(line_no, e.what());
    }
  }
  return log;
}

EventLog read_event_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptLog(0, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_event_log(buf.str());
}

}  // namespace bosg

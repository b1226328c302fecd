#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bosg/graph_io.hpp"
#include "bosg/planner.hpp"
#include "bosg/world.hpp"

namespace bosg {

enum class EventKind {
  PERCEPTION,
  GRAPH_DELTA,
  PLAN,
  DECISION,
  BEHAVIOR_OUTCOME,
  COMMAND,
  AUTONOMY_CHANGED,
  NOTIFICATION,
  MISSION_COMPLETE,
};

std::string_view to_string(EventKind k);
EventKind event_kind_from(std::string_view s);

/// One entry of the append-only mission log.
struct MissionEvent {
  std::uint64_t seq = 0;
  std::uint64_t step = 0;
  EventKind kind = EventKind::NOTIFICATION;
  json payload;

  json to_json() const;
  static MissionEvent from_json(const json& j);
};

// Operator commands -----------------------------------------------------------

struct SetAutonomy {
  AutonomyLevel level;
};
struct AllocateJob {
  NodeId node;
};
struct ExecuteBehavior {
  EdgeId edge;
};
struct Teleop {
  double vx = 0.0;
  double vy = 0.0;
  double wz = 0.0;
};
struct ReleaseTeleop {};
struct Pause {};
struct Resume {};

using OperatorCommand = std::variant<SetAutonomy, AllocateJob, ExecuteBehavior, Teleop, ReleaseTeleop, Pause, Resume>;

/// Wire form, e.g. {"type":"set_autonomy","level":2}.
json to_json(const OperatorCommand& c);
/// Throws InvariantViolation on malformed input.
OperatorCommand command_from_json(const json& j);

json to_json(const PerceptionEvent& e);
json to_json(const Plan& p);
json to_json(const Job& j);
json to_json(const RobotState& r);

/// FNV-1a, used for the config digest in log headers.
std::uint64_t fnv1a64(std::string_view data);

/// JSON Lines writer. The first line is the header record.
class EventLogWriter {
 public:
  EventLogWriter() = default;
  /// Throws LogWriteError when the file cannot be opened.
  EventLogWriter(const std::string& path, const json& header);

  bool is_open() const { return out_.is_open(); }
  void write(const MissionEvent& e);
  void flush();

 private:
  std::ofstream out_;
  std::string path_;
};

struct EventLog {
  std::optional<json> header;
  std::vector<MissionEvent> events;
};

/// Parses a log; throws CorruptLog with the 1-based line number.
EventLog read_event_log(const std::string& path);
EventLog parse_event_log(std::string_view text);

}  // namespace bosg

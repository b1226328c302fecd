#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bosg/graph.hpp"
#include "bosg/gridmap.hpp"

namespace bosg {

enum class Terrain : std::uint8_t { FLOOR, WALL };

struct RobotState {
  Pose2 pose;
  double radius = 0.3;
  double max_speed = 1.0;     ///< m/s
  double max_yaw_rate = 1.5;  ///< rad/s
};

struct SensorConfig {
  int lidar_rays = 72;
  double lidar_range = 5.0;
  double detector_range = 3.0;
  double detector_fov = 2.0 * std::numbers::pi;
  /// Standard deviation of Gaussian noise on detected object positions. Off by default.
  double detection_noise = 0.0;

  void validate() const;
};

/// Body-frame velocity command.
struct VelocityCommand {
  double vx = 0.0;
  double vy = 0.0;
  double wz = 0.0;
};

/// Drive straight toward a target position at full speed.
struct WaypointCommand {
  Pose2 target;
};

using MotionCommand = std::variant<VelocityCommand, WaypointCommand>;

struct PerceptionEvent {
  struct PoseUpdate {
    Pose2 pose;
  };
  struct LocalGrid {
    GridMap gridmap;
  };
  struct ObjectDetected {
    WorldObject object;
  };
  struct DoorStateChanged {
    ObjectId door;
    DoorState state;
  };
  using Payload = std::variant<PoseUpdate, LocalGrid, ObjectDetected, DoorStateChanged>;

  std::uint64_t step = 0;
  Payload payload;
};

struct RayHit {
  double distance = 0.0;
  CellIndex cell;
};

struct Door {
  CellIndex cell;
  DoorState state = DoorState::CLOSED;
};

/// Ground truth for the simulated indoor world. The origin of cell (0, 0) is
/// the world origin; text row 0 of a scenario is the top (largest y) row.
class WorldModel {
 public:
  WorldModel() = default;
  WorldModel(std::string name, int width, int height, double resolution, std::vector<Terrain> terrain,
             RobotState robot, std::uint64_t seed = 0);

  const std::string& name() const { return name_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  std::uint64_t step_index() const { return step_; }

  const RobotState& robot() const { return robot_; }
  RobotState& robot() { return robot_; }

  Terrain terrain(CellIndex c) const;
  bool in_bounds(CellIndex c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  CellIndex cell_of(Point2 p) const;
  Point2 center(CellIndex c) const;
  Box2 box(CellIndex c) const;

  /// WALL, CLOSED door, or outside the map.
  bool blocked(CellIndex c) const;
  /// Whether a disk of `radius` at `p` overlaps no blocked cell.
  bool disk_free(Point2 p, double radius) const;

  const std::map<ObjectId, WorldObject>& objects() const { return objects_; }
  const std::map<ObjectId, Door>& doors() const { return doors_; }
  const Door* door_at(CellIndex c) const;

  /// Places an object; doors also claim their cell. Used by the scenario loader.
  void add_object(WorldObject object);

  /// Advances the robot by one tick.
  RobotState step(const MotionCommand& command, double dt);

  std::vector<PerceptionEvent> sense(const SensorConfig& config);

  PerceptionEvent set_door(ObjectId door, DoorState state);

  /// First WALL or CLOSED-door cell on the ray within `max_range`.
  std::optional<RayHit> raycast(const Pose2& origin, double angle, double max_range) const;

  /// Visits every cell the ray passes through, in order, with the entry
  /// distance. Stops when the visitor returns false, at max_range, or when
  /// the ray leaves the map.
  void traverse(Point2 origin, double angle, double max_range,
                const std::function<bool(CellIndex, double)>& visit) const;

  /// Whether an object at `target` can be seen from `from` (door cells count
  /// as visible when they are the first obstruction).
  bool line_of_sight(Point2 from, Point2 target) const;

  /// Non-wall cells 4-connected to the start, doors included.
  std::vector<CellIndex> reachable_cells() const;

  /// Ground truth in the lattice of this world, as a tri-state grid
  /// (FLOOR and open doors FREE, walls and closed doors OCCUPIED).
  GridMap truth_grid() const;

  CellIndex start_cell() const { return start_; }
  void set_start_cell(CellIndex c) { start_ = c; }

 private:
  std::size_t index(CellIndex c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.x);
  }
  bool advance_robot(Point2 target);
  void move_robot_to(Point2 target);

  std::string name_;
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 1.0;
  std::vector<Terrain> terrain_;
  std::map<ObjectId, WorldObject> objects_;
  std::map<ObjectId, Door> doors_;
  std::map<std::pair<int, int>, ObjectId> door_cells_;
  RobotState robot_;
  CellIndex start_;
  std::uint64_t step_ = 0;
  std::mt19937_64 rng_;
};

/// Parses the scenario text format. Header lines `key: value` (resolution,
/// name, optional robot_radius and object declarations), a blank line, then
/// the ASCII map.
WorldModel load_scenario(std::string_view text, std::uint64_t seed = 0);
WorldModel load_scenario_file(const std::string& path, std::uint64_t seed = 0);

}  // namespace bosg

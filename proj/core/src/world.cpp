#include "bosg/world.hpp"

#include <cmath>
#include <deque>

#include "bosg/errors.hpp"

namespace bosg {

void SensorConfig::validate() const {
  if (lidar_rays <= 0 || !(lidar_range > 0.0) || !(detector_range > 0.0) || !(detector_fov > 0.0)) {
    throw InvariantViolation("sensor parameters must be positive");
  }
  if (detection_noise < 0.0) throw InvariantViolation("detection noise must be >= 0");
}

WorldModel::WorldModel(std::string name, int width, int height, double resolution, std::vector<Terrain> terrain,
                       RobotState robot, std::uint64_t seed)
    : name_(std::move(name)),
      width_(width),
      height_(height),
      resolution_(resolution),
      terrain_(std::move(terrain)),
      robot_(robot),
      rng_(seed) {
  if (width <= 0 || height <= 0) throw InvariantViolation("world must have cells");
  if (!(resolution > 0.0)) throw InvariantViolation("world resolution must be positive");
  if (terrain_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InvariantViolation("terrain size mismatch");
  }
  if (!(robot.radius > 0.0)) throw InvariantViolation("robot radius must be positive");
}

Terrain WorldModel::terrain(CellIndex c) const { return in_bounds(c) ? terrain_[index(c)] : Terrain::WALL; }

CellIndex WorldModel::cell_of(Point2 p) const {
  return {static_cast<int>(std::floor(p.x / resolution_)), static_cast<int>(std::floor(p.y / resolution_))};
}

Point2 WorldModel::center(CellIndex c) const { return {(c.x + 0.5) * resolution_, (c.y + 0.5) * resolution_}; }

Box2 WorldModel::box(CellIndex c) const {
  return {{c.x * resolution_, c.y * resolution_}, {(c.x + 1) * resolution_, (c.y + 1) * resolution_}};
}

const Door* WorldModel::door_at(CellIndex c) const {
  auto it = door_cells_.find({c.x, c.y});
  return it == door_cells_.end() ? nullptr : &doors_.at(it->second);
}

bool WorldModel::blocked(CellIndex c) const {
  if (!in_bounds(c) || terrain_[index(c)] == Terrain::WALL) return true;
  const Door* d = door_at(c);
  return d != nullptr && d->state == DoorState::CLOSED;
}

bool WorldModel::disk_free(Point2 p, double radius) const {
  const CellIndex lo = cell_of({p.x - radius, p.y - radius});
  const CellIndex hi = cell_of({p.x + radius, p.y + radius});
  for (int y = lo.y; y <= hi.y; ++y) {
    for (int x = lo.x; x <= hi.x; ++x) {
      const CellIndex c{x, y};
      if (blocked(c) && point_box_distance(p, box(c)) < radius) return false;
    }
  }
  return true;
}

void WorldModel::add_object(WorldObject object) {
  validate_object(object);
  const CellIndex c = cell_of(object.pose.position());
  if (terrain(c) == Terrain::WALL) throw ObjectOnWall("object " + std::to_string(object.id.value) + " on a wall");
  if (object.label == ObjectLabel::DOOR) {
    doors_[object.id] = Door{c, *object.state};
    door_cells_[{c.x, c.y}] = object.id;
  }
  objects_[object.id] = std::move(object);
}

bool WorldModel::advance_robot(Point2 target) {
  const Point2 from = robot_.pose.position();
  if (disk_free(target, robot_.radius)) {
    robot_.pose.x = target.x;
    robot_.pose.y = target.y;
    return true;
  }
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 30; ++i) {
    const double mid = 0.5 * (lo + hi);
    const Point2 p{from.x + mid * (target.x - from.x), from.y + mid * (target.y - from.y)};
    if (disk_free(p, robot_.radius)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  robot_.pose.x = from.x + lo * (target.x - from.x);
  robot_.pose.y = from.y + lo * (target.y - from.y);
  return false;
}

void WorldModel::move_robot_to(Point2 target) {
  if (advance_robot(target)) return;
  // Slide along whichever axis is still free, so a robot grazing a door jamb
  // or a wall corner keeps moving.
  advance_robot({target.x, robot_.pose.y});
  advance_robot({robot_.pose.x, target.y});
}

RobotState WorldModel::step(const MotionCommand& command, double dt) {
  if (!(dt > 0.0)) throw InvariantViolation("dt must be positive");
  Pose2& pose = robot_.pose;
  if (const auto* v = std::get_if<VelocityCommand>(&command)) {
    double vx = v->vx;
    double vy = v->vy;
    const double speed = std::hypot(vx, vy);
    if (speed > robot_.max_speed) {
      vx *= robot_.max_speed / speed;
      vy *= robot_.max_speed / speed;
    }
    const double wz = std::clamp(v->wz, -robot_.max_yaw_rate, robot_.max_yaw_rate);
    const double c = std::cos(pose.theta);
    const double s = std::sin(pose.theta);
    move_robot_to({pose.x + (c * vx - s * vy) * dt, pose.y + (s * vx + c * vy) * dt});
    pose.theta = normalize_angle(pose.theta + wz * dt);
  } else {
    const auto& w = std::get<WaypointCommand>(command);
    const double dx = w.target.x - pose.x;
    const double dy = w.target.y - pose.y;
    const double dist = std::hypot(dx, dy);
    if (dist > 0.0) {
      const double travel = std::min(dist, robot_.max_speed * dt);
      pose.theta = normalize_angle(std::atan2(dy, dx));
      move_robot_to({pose.x + dx / dist * travel, pose.y + dy / dist * travel});
    }
  }
  ++step_;
  return robot_;
}

void WorldModel::traverse(Point2 origin, double angle, double max_range,
                          const std::function<bool(CellIndex, double)>& visit) const {
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  CellIndex cell = cell_of(origin);
  const int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  const double inf = std::numeric_limits<double>::infinity();
  double t_max_x = inf;
  double t_max_y = inf;
  double t_delta_x = inf;
  double t_delta_y = inf;
  if (step_x != 0) {
    const double boundary = (cell.x + (step_x > 0 ? 1 : 0)) * resolution_;
    t_max_x = (boundary - origin.x) / dx;
    t_delta_x = resolution_ / std::abs(dx);
  }
  if (step_y != 0) {
    const double boundary = (cell.y + (step_y > 0 ? 1 : 0)) * resolution_;
    t_max_y = (boundary - origin.y) / dy;
    t_delta_y = resolution_ / std::abs(dy);
  }
  double t = 0.0;
  while (true) {
    if (!in_bounds(cell)) return;
    if (!visit(cell, t)) return;
    if (t_max_x < t_max_y) {
      t = t_max_x;
      t_max_x += t_delta_x;
      cell.x += step_x;
    } else {
      t = t_max_y;
      t_max_y += t_delta_y;
      cell.y += step_y;
    }
    if (t > max_range) return;
  }
}

std::optional<RayHit> WorldModel::raycast(const Pose2& origin, double angle, double max_range) const {
  if (!(max_range > 0.0)) throw InvariantViolation("max_range must be positive");
  std::optional<RayHit> hit;
  traverse(origin.position(), angle, max_range, [&](CellIndex c, double t) {
    if (blocked(c)) {
      hit = RayHit{t, c};
      return false;
    }
    return true;
  });
  return hit;
}

bool WorldModel::line_of_sight(Point2 from, Point2 target) const {
  const double dist = distance(from, target);
  const CellIndex goal = cell_of(target);
  if (dist == 0.0) return true;
  bool visible = true;
  traverse(from, std::atan2(target.y - from.y, target.x - from.x), dist, [&](CellIndex c, double) {
    if (c == goal) return false;
    if (blocked(c)) {
      visible = false;
      return false;
    }
    return true;
  });
  return visible;
}

std::vector<PerceptionEvent> WorldModel::sense(const SensorConfig& config) {
  config.validate();
  std::vector<PerceptionEvent> events;
  const Pose2 pose = robot_.pose;
  events.push_back({step_, PerceptionEvent::PoseUpdate{pose}});

  const int half = static_cast<int>(std::ceil(config.lidar_range / resolution_));
  const CellIndex rc = cell_of(pose.position());
  const Pose2 origin((rc.x - half) * resolution_, (rc.y - half) * resolution_, 0.0);
  GridMap local(2 * half + 1, 2 * half + 1, resolution_, origin);
  for (int i = 0; i < config.lidar_rays; ++i) {
    const double angle = pose.theta + 2.0 * std::numbers::pi * i / config.lidar_rays;
    traverse(pose.position(), angle, config.lidar_range, [&](CellIndex c, double) {
      const CellIndex lc{c.x - rc.x + half, c.y - rc.y + half};
      const bool hit = blocked(c);
      if (local.in_bounds(lc)) {
        if (hit) {
          local.set(lc, CellState::OCCUPIED);
        } else if (local.at(lc) == CellState::UNKNOWN) {
          local.set(lc, CellState::FREE);
        }
      }
      return !hit;
    });
  }
  events.push_back({step_, PerceptionEvent::LocalGrid{std::move(local)}});

  std::normal_distribution<double> noise(0.0, config.detection_noise > 0.0 ? config.detection_noise : 1.0);
  for (const auto& [id, obj] : objects_) {
    const Point2 p = obj.pose.position();
    const double d = distance(pose.position(), p);
    if (d > config.detector_range) continue;
    if (d > 0.0 && config.detector_fov < 2.0 * std::numbers::pi) {
      const double bearing = normalize_angle(std::atan2(p.y - pose.y, p.x - pose.x) - pose.theta);
      if (std::abs(bearing) > 0.5 * config.detector_fov) continue;
    }
    if (!line_of_sight(pose.position(), p)) continue;
    WorldObject seen = obj;
    seen.pose.z = 0.0;
    seen.pose.roll = 0.0;
    seen.pose.pitch = 0.0;
    if (config.detection_noise > 0.0) {
      seen.pose.x += noise(rng_);
      seen.pose.y += noise(rng_);
    }
    events.push_back({step_, PerceptionEvent::ObjectDetected{seen}});
  }
  return events;
}

PerceptionEvent WorldModel::set_door(ObjectId door, DoorState state) {
  auto it = objects_.find(door);
  if (it == objects_.end()) throw UnknownObject("object " + std::to_string(door.value));
  if (it->second.label != ObjectLabel::DOOR) throw NotADoor("object " + std::to_string(door.value));
  it->second.state = state;
  doors_.at(door).state = state;
  return {step_, PerceptionEvent::DoorStateChanged{door, state}};
}

std::vector<CellIndex> WorldModel::reachable_cells() const {
  std::vector<char> seen(terrain_.size(), 0);
  std::vector<CellIndex> out;
  if (terrain(start_) == Terrain::WALL) return out;
  std::deque<CellIndex> queue{start_};
  seen[index(start_)] = 1;
  while (!queue.empty()) {
    const CellIndex c = queue.front();
    queue.pop_front();
    out.push_back(c);
    const CellIndex nbrs[4] = {{c.x + 1, c.y}, {c.x - 1, c.y}, {c.x, c.y + 1}, {c.x, c.y - 1}};
    for (const auto& n : nbrs) {
      if (!in_bounds(n) || seen[index(n)] || terrain_[index(n)] == Terrain::WALL) continue;
      seen[index(n)] = 1;
      queue.push_back(n);
    }
  }
  return out;
}

GridMap WorldModel::truth_grid() const {
  GridMap g(width_, height_, resolution_, Pose2{});
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      g.set({x, y}, blocked({x, y}) ? CellState::OCCUPIED : CellState::FREE);
    }
  }
  return g;
}

}  // namespace bosg

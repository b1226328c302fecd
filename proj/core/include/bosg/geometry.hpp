#pragma once

#include <cmath>
#include <numbers>
#include <algorithm>

namespace bosg {

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  if (!std::isfinite(a)) return a;
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Planar pose of a place or of the robot.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose2() = default;
  Pose2(double x_, double y_, double theta_ = 0.0) : x(x_), y(y_), theta(normalize_angle(theta_)) {}

  Point2 position() const { return {x, y}; }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(theta); }

  friend bool operator==(const Pose2&, const Pose2&) = default;
};

/// Spatial pose of a world object. The simulator only fills the planar part.
struct Pose3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  Point2 position() const { return {x, y}; }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z) && std::isfinite(roll) &&
           std::isfinite(pitch) && std::isfinite(yaw);
  }
  friend bool operator==(const Pose3&, const Pose3&) = default;
};

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }
inline double distance(const Pose2& a, const Pose2& b) { return distance(a.position(), b.position()); }

/// Shortest distance between segment [a, b] and point p.
inline double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return distance(p, {a.x + t * dx, a.y + t * dy});
}

/// Axis-aligned box [min, max].
struct Box2 {
  Point2 min;
  Point2 max;

  bool contains(Point2 p) const { return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y; }
};

inline double point_box_distance(Point2 p, const Box2& box) {
  const double dx = std::max({box.min.x - p.x, 0.0, p.x - box.max.x});
  const double dy = std::max({box.min.y - p.y, 0.0, p.y - box.max.y});
  return std::hypot(dx, dy);
}

bool segment_intersects_box(Point2 a, Point2 b, const Box2& box);

/// Minimum distance between a segment and a box; zero when they intersect.
double segment_box_distance(Point2 a, Point2 b, const Box2& box);

}  // namespace bosg

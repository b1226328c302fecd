#include "bosg/geometry.hpp"

#include <algorithm>

namespace bosg {

bool segment_intersects_box(Point2 a, Point2 b, const Box2& box) {
  // Liang-Barsky clip.
  double t0 = 0.0;
  double t1 = 1.0;
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x - box.min.x, box.max.x - a.x, a.y - box.min.y, box.max.y - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return false;
  }
  return true;
}

double segment_box_distance(Point2 a, Point2 b, const Box2& box) {
  if (segment_intersects_box(a, b, box)) return 0.0;
  double d = std::min(point_box_distance(a, box), point_box_distance(b, box));
  const Point2 corners[4] = {box.min, {box.max.x, box.min.y}, box.max, {box.min.x, box.max.y}};
  for (const auto& c : corners) d = std::min(d, point_segment_distance(c, a, b));
  return d;
}

}  // namespace bosg

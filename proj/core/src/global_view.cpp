#include "bosg/global_view.hpp"

#include <cmath>

#include "bosg/errors.hpp"

namespace bosg {

GlobalView::GlobalView(int width, int height, double resolution, Pose2 origin)
    : grid_(width, height, resolution, origin) {}

std::vector<CellIndex> GlobalView::merge(const GridMap& local) {
  std::vector<CellIndex> occupied;
  if (local.empty()) return occupied;
  if (std::abs(local.resolution() - grid_.resolution()) > 1e-9) {
    throw InvariantViolation("local gridmap resolution differs from the global view");
  }
  const int ox = static_cast<int>(std::lround((local.origin().x - grid_.origin().x) / grid_.resolution()));
  const int oy = static_cast<int>(std::lround((local.origin().y - grid_.origin().y) / grid_.resolution()));
  for (int y = 0; y < local.height(); ++y) {
    for (int x = 0; x < local.width(); ++x) {
      const CellState s = local.at({x, y});
      if (s == CellState::UNKNOWN) continue;
      const CellIndex g{x + ox, y + oy};
      if (!grid_.in_bounds(g)) continue;
      const CellState before = grid_.at(g);
      if (before == s) continue;
      if (before == CellState::UNKNOWN) ++known_;
      grid_.set(g, s);
      if (s == CellState::OCCUPIED) occupied.push_back(g);
    }
  }
  return occupied;
}

bool GlobalView::corridor_avoids(Point2 a, Point2 b, double radius, const std::vector<CellIndex>& cells) const {
  for (const auto& c : cells) {
    if (segment_box_distance(a, b, grid_.box(c)) < radius) return false;
  }
  return true;
}

bool GlobalView::corridor_clear(Point2 a, Point2 b, double radius) const {
  const CellIndex lo = grid_.cell_of_unchecked({std::min(a.x, b.x) - radius, std::min(a.y, b.y) - radius});
  const CellIndex hi = grid_.cell_of_unchecked({std::max(a.x, b.x) + radius, std::max(a.y, b.y) + radius});
  for (int y = lo.y; y <= hi.y; ++y) {
    for (int x = lo.x; x <= hi.x; ++x) {
      const CellIndex c{x, y};
      if (at(c) != CellState::OCCUPIED) continue;
      if (segment_box_distance(a, b, grid_.box(c)) < radius) return false;
    }
  }
  return true;
}

template <typename F>
void GlobalView::for_each_cell_on_segment(Point2 a, Point2 b, F&& f) const {
  const double len = distance(a, b);
  CellIndex cell = grid_.cell_of_unchecked(a);
  const CellIndex goal = grid_.cell_of_unchecked(b);
  if (len == 0.0) {
    f(cell);
    return;
  }
  const double dx = (b.x - a.x) / len;
  const double dy = (b.y - a.y) / len;
  const int sx = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int sy = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  const double res = grid_.resolution();
  const double inf = std::numeric_limits<double>::infinity();
  double tx = sx != 0 ? ((grid_.origin().x + (cell.x + (sx > 0 ? 1 : 0)) * res) - a.x) / dx : inf;
  double ty = sy != 0 ? ((grid_.origin().y + (cell.y + (sy > 0 ? 1 : 0)) * res) - a.y) / dy : inf;
  const double ddx = sx != 0 ? res / std::abs(dx) : inf;
  const double ddy = sy != 0 ? res / std::abs(dy) : inf;
  while (true) {
    if (!f(cell)) return;
    if (cell == goal) return;
    double t;
    if (tx < ty) {
      t = tx;
      tx += ddx;
      cell.x += sx;
    } else {
      t = ty;
      ty += ddy;
      cell.y += sy;
    }
    if (t > len) return;
  }
}

bool GlobalView::segment_known_free(Point2 a, Point2 b) const {
  bool ok = true;
  for_each_cell_on_segment(a, b, [&](CellIndex c) {
    if (at(c) != CellState::FREE) ok = false;
    return ok;
  });
  return ok;
}

bool GlobalView::line_of_sight(Point2 a, Point2 b) const {
  bool ok = true;
  for_each_cell_on_segment(a, b, [&](CellIndex c) {
    if (at(c) == CellState::OCCUPIED) ok = false;
    return ok;
  });
  return ok;
}

bool GlobalView::unknown_within(Point2 p, double radius) const {
  const double r = radius + 1e-9;
  const CellIndex lo = grid_.cell_of_unchecked({p.x - r, p.y - r});
  const CellIndex hi = grid_.cell_of_unchecked({p.x + r, p.y + r});
  for (int y = lo.y - 1; y <= hi.y + 1; ++y) {
    for (int x = lo.x - 1; x <= hi.x + 1; ++x) {
      const CellIndex c{x, y};
      if (!grid_.in_bounds(c) || grid_.at(c) != CellState::UNKNOWN) continue;
      if (distance(grid_.center(c), p) <= r) return true;
    }
  }
  return false;
}

}  // namespace bosg

#pragma once

#include <vector>

#include "bosg/gridmap.hpp"

namespace bosg {

/// Fused occupancy grid over every local gridmap recorded so far. Known cells
/// are never forgotten; the latest observation of a cell wins.
class GlobalView {
 public:
  GlobalView() = default;
  GlobalView(int width, int height, double resolution, Pose2 origin = {});

  const GridMap& grid() const { return grid_; }
  CellState at(CellIndex c) const { return grid_.at_or(c, CellState::OCCUPIED); }
  std::size_t known_cells() const { return known_; }

  /// Composites a local gridmap aligned to the same lattice. Returns the
  /// cells that turned OCCUPIED in this merge.
  std::vector<CellIndex> merge(const GridMap& local);

  /// True when no OCCUPIED cell comes closer than `radius` to segment [a, b].
  bool corridor_clear(Point2 a, Point2 b, double radius) const;
  /// True when none of `cells` comes closer than `radius` to segment [a, b].
  bool corridor_avoids(Point2 a, Point2 b, double radius, const std::vector<CellIndex>& cells) const;
  /// True when every cell the segment passes through is FREE.
  bool segment_known_free(Point2 a, Point2 b) const;
  /// True when no OCCUPIED cell lies on the segment between a and b.
  bool line_of_sight(Point2 a, Point2 b) const;
  /// Any UNKNOWN cell whose center lies within `radius` of p.
  bool unknown_within(Point2 p, double radius) const;

 private:
  template <typename F>
  void for_each_cell_on_segment(Point2 a, Point2 b, F&& f) const;

  GridMap grid_;
  std::size_t known_ = 0;
};

}  // namespace bosg

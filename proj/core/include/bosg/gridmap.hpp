#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bosg/geometry.hpp"

namespace bosg {

enum class CellState : std::uint8_t { UNKNOWN, FREE, OCCUPIED };

struct CellIndex {
  int x = 0;
  int y = 0;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

/// Tri-state occupancy grid. Cell (0, 0) has its lower-left corner at `origin`;
/// x grows with column index, y with row index. The grid is axis aligned, the
/// origin heading is carried but not applied.
class GridMap {
 public:
  GridMap() = default;
  GridMap(int width, int height, double resolution, Pose2 origin = {},
          CellState fill = CellState::UNKNOWN);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  const Pose2& origin() const { return origin_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  const std::vector<CellState>& cells() const { return cells_; }

  bool in_bounds(CellIndex c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  CellState at(CellIndex c) const { return cells_[index(c)]; }
  CellState at_or(CellIndex c, CellState fallback) const { return in_bounds(c) ? at(c) : fallback; }
  void set(CellIndex c, CellState s) { cells_[index(c)] = s; }

  /// Cell containing the point; nullopt when outside the grid.
  std::optional<CellIndex> cell_of(Point2 p) const;
  /// Cell containing the point, without bounds checking.
  CellIndex cell_of_unchecked(Point2 p) const;
  Point2 center(CellIndex c) const;
  Box2 box(CellIndex c) const;

  std::size_t count(CellState s) const;
  bool all(CellState s) const;

  /// Run-length text over U/F/O, e.g. "12U3F1O".
  std::string to_rle() const;
  static std::vector<CellState> cells_from_rle(std::string_view rle, std::size_t expected);
  static GridMap from_rle(int width, int height, double resolution, Pose2 origin, std::string_view rle);

  friend bool operator==(const GridMap&, const GridMap&) = default;

 private:
  std::size_t index(CellIndex c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.x);
  }

  int width_ = 0;
  int height_ = 0;
  double resolution_ = 1.0;
  Pose2 origin_;
  std::vector<CellState> cells_;
};

char cell_state_char(CellState s);

}  // namespace bosg

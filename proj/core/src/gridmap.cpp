#include "bosg/gridmap.hpp"

#include <algorithm>
#include <cmath>

#include "bosg/errors.hpp"

namespace bosg {

GridMap::GridMap(int width, int height, double resolution, Pose2 origin, CellState fill)
    : width_(width), height_(height), resolution_(resolution), origin_(origin) {
  if (width < 0 || height < 0) throw InvariantViolation("gridmap dimensions must be non-negative");
  if (!(resolution > 0.0)) throw InvariantViolation("gridmap resolution must be positive");
  cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

CellIndex GridMap::cell_of_unchecked(Point2 p) const {
  return {static_cast<int>(std::floor((p.x - origin_.x) / resolution_)),
          static_cast<int>(std::floor((p.y - origin_.y) / resolution_))};
}

std::optional<CellIndex> GridMap::cell_of(Point2 p) const {
  const CellIndex c = cell_of_unchecked(p);
  if (!in_bounds(c)) return std::nullopt;
  return c;
}

Point2 GridMap::center(CellIndex c) const {
  return {origin_.x + (c.x + 0.5) * resolution_, origin_.y + (c.y + 0.5) * resolution_};
}

Box2 GridMap::box(CellIndex c) const {
  const Point2 lo{origin_.x + c.x * resolution_, origin_.y + c.y * resolution_};
  return {lo, {lo.x + resolution_, lo.y + resolution_}};
}

std::size_t GridMap::count(CellState s) const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), s));
}

bool GridMap::all(CellState s) const {
  return std::all_of(cells_.begin(), cells_.end(), [s](CellState c) { return c == s; });
}

char cell_state_char(CellState s) {
  switch (s) {
    case CellState::FREE:
      return 'F';
    case CellState::OCCUPIED:
      return 'O';
    case CellState::UNKNOWN:
      break;
  }
  return 'U';
}

std::string GridMap::to_rle() const {
  std::string out;
  std::size_t i = 0;
  while (i < cells_.size()) {
    std::size_t j = i;
    while (j < cells_.size() && cells_[j] == cells_[i]) ++j;
    out += std::to_string(j - i);
    out += cell_state_char(cells_[i]);
    i = j;
  }
  return out;
}

std::vector<CellState> GridMap::cells_from_rle(std::string_view rle, std::size_t expected) {
  std::vector<CellState> cells;
  cells.reserve(expected);
  std::size_t run = 0;
  bool have_digits = false;
  for (char ch : rle) {
    if (ch >= '0' && ch <= '9') {
      run = run * 10 + static_cast<std::size_t>(ch - '0');
      have_digits = true;
      if (run > expected) throw InvariantViolation("rle run exceeds grid size");
      continue;
    }
    CellState s;
    switch (ch) {
      case 'U':
        s = CellState::UNKNOWN;
        break;
      case 'F':
        s = CellState::FREE;
        break;
      case 'O':
        s = CellState::OCCUPIED;
        break;
      default:
        throw InvariantViolation(std::string("bad rle symbol '") + ch + "'");
    }
    if (!have_digits) throw InvariantViolation("rle symbol without count");
    if (cells.size() + run > expected) throw InvariantViolation("rle longer than grid");
    cells.insert(cells.end(), run, s);
    run = 0;
    have_digits = false;
  }
  if (have_digits) throw InvariantViolation("dangling rle count");
  if (cells.size() != expected) throw InvariantViolation("rle shorter than grid");
  return cells;
}

GridMap GridMap::from_rle(int width, int height, double resolution, Pose2 origin, std::string_view rle) {
  GridMap g(width, height, resolution, origin);
  g.cells_ = cells_from_rle(rle, g.cells_.size());
  return g;
}

}  // namespace bosg

#include <charconv>
#include <fstream>
#include <sstream>

#include "bosg/errors.hpp"
#include "bosg/world.hpp"

namespace bosg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError(line, "expected a number, got '" + std::string(s) + "'");
  return v;
}

int parse_int(std::string_view s, std::size_t line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError(line, "expected an integer, got '" + std::string(s) + "'");
  return v;
}

struct PendingObject {
  ObjectLabel label;
  std::optional<DoorState> state;
  int col;
  int row;
  std::size_t line;
};

}  // namespace

WorldModel load_scenario(std::string_view text, std::uint64_t seed) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }

  std::string name = "unnamed";
  std::optional<double> resolution;
  RobotState robot;
  std::vector<PendingObject> declared;

  std::size_t i = 0;
  for (; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty()) break;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError(i + 1, "expected 'key: value' header");
    const std::string_view key = trim(line.substr(0, colon));
    const std::string_view value = trim(line.substr(colon + 1));
    if (key == "resolution") {
      resolution = parse_double(value, i + 1);
      if (!(*resolution > 0.0)) throw ParseError(i + 1, "resolution must be positive");
    } else if (key == "name") {
      name = std::string(value);
    } else if (key == "robot_radius") {
      robot.radius = parse_double(value, i + 1);
      if (!(robot.radius > 0.0)) throw ParseError(i + 1, "robot_radius must be positive");
    } else if (key == "object") {
      std::istringstream in{std::string(value)};
      std::string label, col, row;
      if (!(in >> label >> col >> row)) throw ParseError(i + 1, "object needs '<LABEL> <col> <row>'");
      PendingObject p{ObjectLabel::CONTAINER, std::nullopt, parse_int(col, i + 1), parse_int(row, i + 1), i + 1};
      if (label == "CONTAINER") {
        p.label = ObjectLabel::CONTAINER;
      } else if (label == "PERSON") {
        p.label = ObjectLabel::PERSON;
      } else {
        throw ParseError(i + 1, "object label must be CONTAINER or PERSON");
      }
      declared.push_back(p);
    } else {
      throw ParseError(i + 1, "unknown header key '" + std::string(key) + "'");
    }
  }
  if (!resolution) throw ParseError(i + 1, "missing 'resolution' header");
  ++i;  // blank separator

  std::vector<std::pair<std::size_t, std::string_view>> rows;
  for (; i < lines.size(); ++i) {
    const std::string_view row = trim(lines[i]);
    if (row.empty()) continue;
    rows.emplace_back(i + 1, row);
  }
  if (rows.empty()) throw ParseError(lines.size(), "empty map");
  const int width = static_cast<int>(rows.front().second.size());
  const int height = static_cast<int>(rows.size());

  std::vector<Terrain> terrain(static_cast<std::size_t>(width) * height, Terrain::FLOOR);
  std::vector<PendingObject> grid_objects;
  std::optional<CellIndex> start;
  for (int r = 0; r < height; ++r) {
    const auto [line_no, row] = rows[static_cast<std::size_t>(r)];
    if (static_cast<int>(row.size()) != width) throw ParseError(line_no, "row width differs from first row");
    const int y = height - 1 - r;
    for (int x = 0; x < width; ++x) {
      const char ch = row[static_cast<std::size_t>(x)];
      auto& cell = terrain[static_cast<std::size_t>(y) * width + x];
      switch (ch) {
        case '#':
          cell = Terrain::WALL;
          break;
        case '.':
          break;
        case 'S':
          if (start) throw MultipleStartCells("second start cell at line " + std::to_string(line_no));
          start = CellIndex{x, y};
          break;
        case 'D':
          grid_objects.push_back({ObjectLabel::DOOR, DoorState::CLOSED, x, r, line_no});
          break;
        case 'd':
          grid_objects.push_back({ObjectLabel::DOOR, DoorState::OPEN, x, r, line_no});
          break;
        case 'C':
          grid_objects.push_back({ObjectLabel::CONTAINER, std::nullopt, x, r, line_no});
          break;
        case 'P':
          grid_objects.push_back({ObjectLabel::PERSON, std::nullopt, x, r, line_no});
          break;
        default:
          throw ParseError(line_no, std::string("unknown map symbol '") + ch + "'");
      }
    }
  }
  if (!start) throw NoStartCell("scenario has no 'S' cell");

  WorldModel world(name, width, height, *resolution, std::move(terrain), robot, seed);
  world.set_start_cell(*start);
  const Point2 sp = world.center(*start);
  world.robot().pose = Pose2(sp.x, sp.y, 0.0);

  grid_objects.insert(grid_objects.end(), declared.begin(), declared.end());
  std::uint64_t next_id = 1;
  for (const auto& p : grid_objects) {
    if (p.col < 0 || p.col >= width || p.row < 0 || p.row >= height) throw ParseError(p.line, "object outside map");
    const CellIndex c{p.col, height - 1 - p.row};
    const Point2 center = world.center(c);
    WorldObject o;
    o.id = ObjectId{next_id++};
    o.label = p.label;
    o.pose.x = center.x;
    o.pose.y = center.y;
    o.state = p.state;
    if (world.terrain(c) == Terrain::WALL) {
      throw ObjectOnWall("object at line " + std::to_string(p.line) + " sits on a wall cell");
    }
    world.add_object(std::move(o));
  }
  return world;
}

WorldModel load_scenario_file(const std::string& path, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str(), seed);
}

}  // namespace bosg

#include <algorithm>
#include <deque>

#include "bosg/recorder.hpp"

namespace bosg {

std::vector<FrontierCandidate> find_frontiers(const GlobalView& view, const GraphState& graph,
                                              const RecorderConfig& config, const std::set<CellIndex>& excluded) {
  const GridMap& g = view.grid();
  const int w = g.width();
  const int h = g.height();
  auto is_frontier = [&](CellIndex c) {
    if (!g.in_bounds(c) || g.at(c) != CellState::FREE || excluded.contains(c)) return false;
    const CellIndex nbrs[4] = {{c.x + 1, c.y}, {c.x - 1, c.y}, {c.x, c.y + 1}, {c.x, c.y - 1}};
    for (const auto& n : nbrs) {
      if (g.in_bounds(n) && g.at(n) == CellState::UNKNOWN) return true;
    }
    return false;
  };

  std::vector<char> mark(static_cast<std::size_t>(w) * h, 0);
  auto idx = [w](CellIndex c) { return static_cast<std::size_t>(c.y) * w + c.x; };
  std::vector<FrontierCandidate> out;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const CellIndex seed{x, y};
      if (mark[idx(seed)] || !is_frontier(seed)) continue;
      std::vector<CellIndex> cluster;
      std::deque<CellIndex> queue{seed};
      mark[idx(seed)] = 1;
      while (!queue.empty()) {
        const CellIndex c = queue.front();
        queue.pop_front();
        cluster.push_back(c);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const CellIndex n{c.x + dx, c.y + dy};
            if ((dx == 0 && dy == 0) || !g.in_bounds(n) || mark[idx(n)] || !is_frontier(n)) continue;
            mark[idx(n)] = 1;
            queue.push_back(n);
          }
        }
      }
      if (static_cast<int>(cluster.size()) < config.frontier_min_cluster) continue;

      Point2 centroid{0.0, 0.0};
      for (const auto& c : cluster) {
        const Point2 p = g.center(c);
        centroid.x += p.x;
        centroid.y += p.y;
      }
      centroid.x /= static_cast<double>(cluster.size());
      centroid.y /= static_cast<double>(cluster.size());
      std::sort(cluster.begin(), cluster.end(),
                [](CellIndex a, CellIndex b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });
      CellIndex snapped = cluster.front();
      double best = distance(g.center(snapped), centroid);
      for (const auto& c : cluster) {
        const double d = distance(g.center(c), centroid);
        if (d < best) {
          best = d;
          snapped = c;
        }
      }
      const Point2 p = g.center(snapped);
      const Pose2 pose(p.x, p.y, 0.0);
      if (!graph.empty() && graph.nearest_node(pose).second < config.frontier_separation) continue;
      out.push_back({pose, snapped, std::move(cluster)});
    }
  }
  std::sort(out.begin(), out.end(), [](const FrontierCandidate& a, const FrontierCandidate& b) {
    if (a.cells.size() != b.cells.size()) return a.cells.size() > b.cells.size();
    if (a.pose.x != b.pose.x) return a.pose.x < b.pose.x;
    return a.pose.y < b.pose.y;
  });
  return out;
}

std::vector<Pose2> extract_frontiers(const GlobalView& view, const GraphState& graph, const RecorderConfig& config) {
  std::vector<Pose2> out;
  for (auto& c : find_frontiers(view, graph, config)) out.push_back(c.pose);
  return out;
}

}  // namespace bosg

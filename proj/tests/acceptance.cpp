// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "bosg/errors.hpp"
#include "bosg/graph_io.hpp"
#include "bosg/mission.hpp"
#include "bosg/replay.hpp"
#include "support.hpp"

using namespace bosg;
using namespace bosg::testing;

namespace {

const std::string kMockLab = std::string(BOSG_SCENARIO_DIR) + "/mock_lab.scn";

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("bosg_acceptance_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

MissionConfig lab(const std::string& log) {
  MissionConfig c;
  c.scenario_path = kMockLab;
  c.seed = 42;
  c.level = AutonomyLevel::L1_FULL_AUTONOMY;
  c.step_limit = 10000;
  c.log_path = log;
  return c;
}

std::set<std::size_t> random_frontiers(std::mt19937_64& rng) {
  std::set<std::size_t> out;
  std::bernoulli_distribution coin(0.4);
  for (std::size_t i = 1; i < 10; ++i)
    if (coin(rng)) out.insert(i);
  return out;
}

// Frontier with the largest positive reward minus exhaustive path cost; the
// lowest node id wins ties.
std::optional<Job> brute_force_job(const GraphState& g, NodeId current, const RewardModel& rewards) {
  std::optional<Job> best;
  for (const auto& [id, n] : g.nodes()) {
    if (n.kind != NodeKind::FRONTIER) continue;
    const auto path = exhaustive_path(g, current, id);
    if (!path.found) continue;
    const double r = rewards.reward(n);
    if (r - path.cost > 0.0 && (!best || r - path.cost > best->net)) best = Job{id, r, path.cost, r - path.cost};
  }
  return best;
}

// ---------------------------------------------------------------------------

Verdict planner_optimality() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::size_t pairs = 0, mismatches = 0;
  for (int k = 0; k < 200; ++k) {
    auto r = random_graph(rng);
    for (NodeId from : r.nodes) {
      for (NodeId to : r.nodes) {
        const auto oracle = exhaustive_path(r.g, from, to);
        ++pairs;
        if (!oracle.found) {
          try {
            plan_path(r.g, from, to);
            ++mismatches;
          } catch (const NoPath&) {
          }
          continue;
        }
        if (plan_path(r.g, from, to).total_cost != oracle.cost) ++mismatches;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 5.0,
          fmt("200 graphs, %zu node pairs, %zu mismatches, %.2f s", pairs, mismatches, secs)};
}

Verdict job_selection() {
  std::mt19937_64 rng(99);
  std::size_t mismatches = 0, jobs = 0, invariance_failures = 0, invariance_checks = 0;
  for (int k = 0; k < 200; ++k) {
    const auto seed = rng();
    const auto frontiers = random_frontiers(rng);
    std::mt19937_64 a(seed);
    auto base = random_graph(a, 1.0, frontiers);
    const NodeId start = base.nodes[0];

    const RewardModel rewards{20.0, {}};
    const auto got = select_job(base.g, start, rewards);
    const auto want = brute_force_job(base.g, start, rewards);
    if (got.has_value() != want.has_value() || (got && (got->target != want->target || got->net != want->net))) {
      ++mismatches;
    }
    jobs += got.has_value();

    // With a reward large enough that every reachable frontier is worth
    // visiting, shifting all rewards or scaling rewards and costs together
    // must not change the choice.
    const auto ref = select_job(base.g, start, RewardModel{1000.0, {}});
    if (!ref) continue;
    const auto shifted = select_job(base.g, start, RewardModel{1037.5, {}});
    ++invariance_checks;
    if (!shifted || shifted->target != ref->target) ++invariance_failures;
    for (double s : {0.5, 2.0, 3.0}) {
      std::mt19937_64 b(seed);
      auto scaled = random_graph(b, s, frontiers);
      const auto js = select_job(scaled.g, scaled.nodes[0], RewardModel{1000.0 * s, {}});
      ++invariance_checks;
      // Scaled costs can round differently; an argmax change is only
      // acceptable between frontiers whose costs tie.
      if (!js || (js->target != ref->target && std::abs(js->cost / s - ref->cost) > 1e-9)) ++invariance_failures;
    }
  }
  return {mismatches == 0 && invariance_failures == 0 && jobs > 50 && invariance_checks > 200,
          fmt("%zu brute-force mismatches (%zu jobs), %zu/%zu invariance failures", mismatches, jobs,
              invariance_failures, invariance_checks)};
}

// Exploration run shared by the end-to-end, spacing and frontier checks.
struct Exploration {
  MissionSummary summary;
  double wall_seconds = 0.0;
  std::size_t teleop_requests = 0;
  bool door_open = false;
  double coverage = 0.0;
  std::size_t frontier_checks = 0;
  std::size_t unsound_frontiers = 0;
  std::size_t final_frontiers = 0;
  std::string log_path;
};

// Reachable floor by flood fill over ground truth, doors passable.
std::vector<CellIndex> reachable_floor(const WorldModel& w) {
  std::vector<CellIndex> out;
  std::set<std::pair<int, int>> seen{{w.start_cell().x, w.start_cell().y}};
  std::deque<CellIndex> q{w.start_cell()};
  while (!q.empty()) {
    const CellIndex c = q.front();
    q.pop_front();
    out.push_back(c);
    for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      const CellIndex n{c.x + dx, c.y + dy};
      if (!w.in_bounds(n) || w.terrain(n) == Terrain::WALL || !seen.insert({n.x, n.y}).second) continue;
      q.push_back(n);
    }
  }
  return out;
}

bool unknown_nearby(const GridMap& view, Point2 p, double radius) {
  for (int y = 0; y < view.height(); ++y) {
    for (int x = 0; x < view.width(); ++x) {
      if (view.at({x, y}) != CellState::UNKNOWN) continue;
      const Point2 c = view.center({x, y});
      if (std::hypot(c.x - p.x, c.y - p.y) <= radius) return true;
    }
  }
  return false;
}

Exploration explore() {
  Exploration ex;
  {
    // Timed on its own so the instrumented run below does not count.
    const std::string timed_log = temp_path("explore_timed.jsonl");
    const auto t0 = Clock::now();
    ex.summary = run_mission(lab(timed_log));
    ex.wall_seconds = seconds_since(t0);
    std::remove(timed_log.c_str());
  }
  ex.log_path = temp_path("explore.jsonl");
  Mission m(lab(ex.log_path));
  m.set_event_sink([&](const MissionEvent& e) {
    if (e.kind == EventKind::NOTIFICATION && e.payload.value("type", "") == "teleop_request") ++ex.teleop_requests;
  });
  while (m.step() == MissionStatus::RUNNING) {
    for (const auto& [id, n] : m.graph().nodes()) {
      if (n.kind != NodeKind::FRONTIER) continue;
      ++ex.frontier_checks;
      if (!unknown_nearby(m.recorder().view().grid(), n.pose.position(), 0.5)) ++ex.unsound_frontiers;
    }
  }
  for (const auto& [id, n] : m.graph().nodes()) ex.final_frontiers += n.kind == NodeKind::FRONTIER;
  ex.door_open = !m.world().doors().empty();
  for (const auto& [id, d] : m.world().doors()) ex.door_open = ex.door_open && d.state == DoorState::OPEN;
  const auto floor = reachable_floor(m.world());
  std::size_t seen = 0;
  for (CellIndex c : floor) seen += m.recorder().view().at(c) != CellState::UNKNOWN;
  ex.coverage = static_cast<double>(seen) / static_cast<double>(floor.size());
  return ex;
}

Verdict full_exploration(const Exploration& ex) {
  const auto& s = ex.summary;
  const bool pass = s.status == MissionStatus::COMPLETE && ex.final_frontiers == 0 && ex.coverage >= 0.95 &&
                    ex.door_open && ex.teleop_requests >= 3 && s.steps <= 10000 && ex.wall_seconds < 10.0;
  return {pass, fmt("status %s, %zu frontiers, coverage %.3f, door %s, %zu teleop requests, %llu steps, %.2f s",
                    std::string(to_string(s.status)).c_str(), ex.final_frontiers, ex.coverage,
                    ex.door_open ? "open" : "closed", ex.teleop_requests, static_cast<unsigned long long>(s.steps),
                    ex.wall_seconds)};
}

// Log auditor: consecutive observer waypoints must be at least 2 m apart.
struct SpacingAudit {
  std::size_t waypoints = 0;
  std::size_t violations = 0;
  double closest = std::numeric_limits<double>::infinity();
};

SpacingAudit audit_spacing(const std::string& path) {
  SpacingAudit a;
  std::optional<Point2> last;
  for (const auto& e : read_event_log(path).events) {
    if (e.kind != EventKind::GRAPH_DELTA || e.payload.at("type") != "node_added") continue;
    const json& n = e.payload.at("payload");
    const std::string reason = n.value("reason", "");
    if (n.at("kind") != "WAYPOINT" || reason == "door_approach" || reason == "door_beyond") continue;
    const Point2 p{n.at("pose").at("x").get<double>(), n.at("pose").at("y").get<double>()};
    ++a.waypoints;
    if (last) {
      const double d = std::hypot(p.x - last->x, p.y - last->y);
      a.closest = std::min(a.closest, d);
      if (d < 2.0) ++a.violations;
    }
    last = p;
  }
  return a;
}

Verdict node_spacing(const std::vector<std::string>& logs) {
  std::size_t waypoints = 0, violations = 0;
  double closest = std::numeric_limits<double>::infinity();
  for (const auto& path : logs) {
    const auto a = audit_spacing(path);
    waypoints += a.waypoints;
    violations += a.violations;
    closest = std::min(closest, a.closest);
  }
  return {violations == 0 && waypoints >= 2,
          fmt("%zu observer waypoints over %zu logs, closest pair %.2f m, %zu violations", waypoints, logs.size(),
              closest, violations)};
}

Verdict frontier_soundness(const Exploration& ex) {
  return {ex.unsound_frontiers == 0 && ex.final_frontiers == 0 && ex.frontier_checks > 0,
          fmt("%zu frontier checks, %zu without unknown cells within 0.5 m, %zu at the end", ex.frontier_checks,
              ex.unsound_frontiers, ex.final_frontiers)};
}

// Gating script. Commands are submitted live and also recorded against the
// world step at which they take effect, so the same run can be scripted.
struct GatingRun {
  std::string log_path;
  std::vector<ScheduledCommand> script;
  MissionStatus status = MissionStatus::RUNNING;
  double teleop_displacement = 0.0;
  std::string behavior_outcome;
  bool job_allocated = false;
};

GatingRun gating_run() {
  GatingRun g;
  g.log_path = temp_path("gating.jsonl");
  Mission m(lab(g.log_path));
  m.set_event_sink([&](const MissionEvent& e) {
    if (e.kind == EventKind::BEHAVIOR_OUTCOME && m.level() == AutonomyLevel::L3_OPERATOR_BEHAVIOR) {
      g.behavior_outcome = e.payload.value("status", "");
    }
  });
  auto submit = [&](OperatorCommand c) {
    g.script.push_back({m.world().step_index(), c});
    m.submit(std::move(c));
  };
  auto steps = [&](int n) {
    for (int i = 0; i < n && m.status() == MissionStatus::RUNNING; ++i) m.step();
  };

  steps(80);
  submit(SetAutonomy{AutonomyLevel::L4_TELEOP});
  steps(1);
  const Pose2 before = m.world().robot().pose;
  for (int i = 0; i < 50; ++i) {
    // Out and back so the robot ends near where the operator took over.
    submit(Teleop{i < 25 ? 0.4 : -0.4, 0.0, 0.0});
    steps(1);
    g.teleop_displacement = std::max(g.teleop_displacement, distance(m.world().robot().pose, before));
  }
  steps(5);

  submit(SetAutonomy{AutonomyLevel::L3_OPERATOR_BEHAVIOR});
  steps(1);
  if (const auto cur = m.current()) {
    for (const auto& [id, e] : m.graph().edges()) {
      if (e.source == *cur && e.behavior == BehaviorKind::GOTO) {
        submit(ExecuteBehavior{id});
        break;
      }
    }
  }
  steps(1);
  for (int i = 0; i < 300 && m.behavior_running(); ++i) steps(1);
  steps(5);

  submit(SetAutonomy{AutonomyLevel::L2_OPERATOR_JOBS});
  steps(1);
  for (const auto& [id, n] : m.graph().nodes()) {
    if (n.kind == NodeKind::FRONTIER) {
      submit(AllocateJob{id});
      g.job_allocated = true;
      break;
    }
  }
  steps(150);

  submit(SetAutonomy{AutonomyLevel::L1_FULL_AUTONOMY});
  while (m.step() == MissionStatus::RUNNING) {
  }
  g.status = m.status();
  return g;
}

struct GatingAudit {
  std::size_t violations = 0;
  std::size_t l4_steps = 0;
  std::size_t teleop_moves = 0;
  std::set<int> levels_seen;
  std::vector<std::string> notes;
};

// Replays the log against the gating rules: no plans at L3/L4, no job
// selection at L2-L4, no accepted teleop below L4, and at L4 the robot only
// moves on steps with an accepted teleop command.
GatingAudit audit_gating(const std::string& path, int initial_level) {
  GatingAudit a;
  int level = initial_level;
  a.levels_seen.insert(level);
  std::map<std::uint64_t, bool> teleop_at;  // step -> accepted teleop applied
  std::map<std::uint64_t, int> level_at;    // step -> level when the step ended
  std::map<std::uint64_t, Point2> pose_at;  // step -> sensed pose
  auto violation = [&](const MissionEvent& e, const std::string& what) {
    ++a.violations;
    if (a.notes.size() < 5) a.notes.push_back("step " + std::to_string(e.step) + ": " + what);
  };
  for (const auto& e : read_event_log(path).events) {
    switch (e.kind) {
      case EventKind::AUTONOMY_CHANGED:
        level = e.payload.at("level").get<int>();
        a.levels_seen.insert(level);
        break;
      case EventKind::PLAN:
        if (level >= 3) violation(e, "plan at level " + std::to_string(level));
        break;
      case EventKind::DECISION:
        if (e.payload.value("type", "") == "job_selected" && level >= 2) {
          violation(e, "job selected at level " + std::to_string(level));
        }
        break;
      case EventKind::COMMAND:
        if (e.payload.at("command").at("type") == "teleop" && e.payload.at("accepted").get<bool>()) {
          if (level != 4) violation(e, "teleop accepted at level " + std::to_string(level));
          teleop_at[e.step] = true;
        }
        break;
      case EventKind::PERCEPTION:
        if (e.payload.value("type", "") == "pose_update") {
          const json& p = e.payload.at("pose");
          pose_at[e.step] = {p.at("x").get<double>(), p.at("y").get<double>()};
        }
        break;
      default:
        break;
    }
    level_at[e.step] = level;
  }
  // The world moves during the tick at the end of step k; the pose sensed at
  // the start of step k + 1 shows the result.
  for (const auto& [k, p] : pose_at) {
    const auto next = pose_at.find(k + 1);
    if (next == pose_at.end() || level_at[k] != 4) continue;
    ++a.l4_steps;
    const bool moved = next->second.x != p.x || next->second.y != p.y;
    if (!moved) continue;
    if (teleop_at.contains(k)) {
      ++a.teleop_moves;
    } else {
      ++a.violations;
      if (a.notes.size() < 5) a.notes.push_back("step " + std::to_string(k) + ": moved at L4 without teleop");
    }
  }
  return a;
}

Verdict autonomy_gating(const GatingRun& g) {
  const auto a = audit_gating(g.log_path, 1);
  const bool all_levels = a.levels_seen == std::set<int>{1, 2, 3, 4};
  std::string detail = fmt("%zu violations, levels seen %zu/4, %zu L4 steps, %zu teleop moves (max %.2f m), L3 "
                           "behavior %s, job %s, final %s",
                           a.violations, a.levels_seen.size(), a.l4_steps, a.teleop_moves, g.teleop_displacement,
                           g.behavior_outcome.empty() ? "none" : g.behavior_outcome.c_str(),
                           g.job_allocated ? "allocated" : "not allocated", std::string(to_string(g.status)).c_str());
  for (const auto& n : a.notes) detail += "; " + n;
  return {a.violations == 0 && all_levels && a.teleop_moves > 0 && !g.behavior_outcome.empty() && g.job_allocated,
          detail};
}

Verdict determinism(const GatingRun& g) {
  std::string logs[2];
  MissionSummary sums[2];
  for (int i = 0; i < 2; ++i) {
    const std::string path = temp_path("determinism_" + std::to_string(i) + ".jsonl");
    MissionConfig c = lab(path);
    c.commands = g.script;
    Mission m(c);
    sums[i] = m.run();
    logs[i] = slurp(path);
    if (i == 1) std::remove(path.c_str());
  }
  const bool identical = !logs[0].empty() && logs[0] == logs[1];
  const std::string path0 = temp_path("determinism_0.jsonl");
  const ReplayResult r = replay_file(path0);
  std::remove(path0.c_str());
  const bool replayed = r.graph.revision() == sums[0].revision && r.graph.node_count() == sums[0].nodes &&
                        r.graph.edge_count() == sums[0].edges;
  return {identical && replayed && g.script.size() >= 50,
          fmt("%zu scripted commands, logs %s (%zu bytes), replay revision %llu/%llu nodes %zu/%zu edges %zu/%zu",
              g.script.size(), identical ? "identical" : "differ", logs[0].size(),
              static_cast<unsigned long long>(r.graph.revision()), static_cast<unsigned long long>(sums[0].revision),
              r.graph.node_count(), sums[0].nodes, r.graph.edge_count(), sums[0].edges)};
}

// Field-by-field comparison, independent of the library's equality.
bool same_graph(const GraphState& a, const GraphState& b) {
  if (a.revision() != b.revision() || a.nodes().size() != b.nodes().size() || a.edges().size() != b.edges().size()) {
    return false;
  }
  for (const auto& [id, n] : a.nodes()) {
    const Node* m = b.find_node(id);
    if (m == nullptr || n.kind != m->kind || n.pose.x != m->pose.x || n.pose.y != m->pose.y ||
        n.pose.theta != m->pose.theta) {
      return false;
    }
    const auto& s = n.situation();
    const auto& t = m->situation();
    if (s.gridmap.cells() != t.gridmap.cells() || s.gridmap.width() != t.gridmap.width() ||
        s.gridmap.resolution() != t.gridmap.resolution() || s.objects.size() != t.objects.size()) {
      return false;
    }
    for (std::size_t i = 0; i < s.objects.size(); ++i) {
      const auto &o = s.objects[i], &p = t.objects[i];
      if (o.id != p.id || o.label != p.label || o.state != p.state || o.pose.x != p.pose.x || o.pose.y != p.pose.y) {
        return false;
      }
    }
  }
  for (const auto& [id, e] : a.edges()) {
    const Edge* f = b.find_edge(id);
    if (f == nullptr || e.source != f->source || e.target != f->target || e.behavior != f->behavior ||
        e.object_params != f->object_params || e.cost != f->cost) {
      return false;
    }
  }
  return true;
}

Verdict graph_round_trip() {
  std::mt19937_64 rng(8);
  std::size_t equal = 0;
  for (int i = 0; i < 100; ++i) {
    const GraphSnapshot s = random_snapshot(rng);
    const GraphSnapshot back = snapshot_from_json(json::parse(snapshot_to_json(s, true).dump()));
    equal += same_graph(s, back);
  }
  return {equal == 100, fmt("%zu/100 snapshots structurally equal after a JSON round trip", equal)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](const char* name, const std::function<Verdict()>& check) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << name << ": " << v.detail << std::endl;
  };

  report("planner optimality", planner_optimality);
  report("job selection", job_selection);

  Exploration ex;
  GatingRun gating;
  bool explored = false, gated = false;
  auto need_exploration = [&] {
    if (!explored) ex = explore();
    explored = true;
  };
  auto need_gating = [&] {
    if (!gated) gating = gating_run();
    gated = true;
  };

  report("full autonomous exploration", [&] {
    need_exploration();
    return full_exploration(ex);
  });
  report("node spacing", [&] {
    need_exploration();
    need_gating();
    return node_spacing({ex.log_path, gating.log_path});
  });
  report("frontier soundness", [&] {
    need_exploration();
    return frontier_soundness(ex);
  });
  report("autonomy gating", [&] {
    need_gating();
    return autonomy_gating(gating);
  });
  report("determinism and replay", [&] {
    need_gating();
    return determinism(gating);
  });
  report("graph round trip", graph_round_trip);

  std::remove(ex.log_path.c_str());
  std::remove(gating.log_path.c_str());
  return failures == 0 ? 0 : 1;
}

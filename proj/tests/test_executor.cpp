#include <gtest/gtest.h>

#include "bosg/errors.hpp"
#include "bosg/executor.hpp"
#include "support.hpp"

using namespace bosg;
using bosg::testing::make_door;
using bosg::testing::make_object;

namespace {

const std::string kMockLab = std::string(BOSG_SCENARIO_DIR) + "/mock_lab.scn";

// 3-cell wide corridor, 16 m of floor, robot near the west end; the middle
// row has its centre at y = 1.25.
WorldModel corridor(char mid = '.') {
  std::string row = "#" + std::string(32, '.') + "#";
  std::string start = row;
  start[2] = 'S';
  std::string t = "resolution: 0.5\nrobot_radius: 0.2\n\n" + std::string(34, '#') + "\n";
  std::string top = row, bottom = row;
  top[12] = bottom[12] = mid == '.' ? '.' : '#';
  start[12] = mid;
  t += top + "\n" + start + "\n" + bottom + "\n" + std::string(34, '#') + "\n";
  return load_scenario(t);
}

ObjectId first(const WorldModel& w, ObjectLabel label) {
  for (const auto& [id, o] : w.objects())
    if (o.label == label) return id;
  return ObjectId{};
}

struct Line {
  SituationalGraph g;
  std::vector<NodeId> nodes;
  std::vector<EdgeId> forward;

  Line(const WorldModel& w, std::vector<double> offsets) {
    const Pose2 r = w.robot().pose;
    for (double dx : offsets) nodes.push_back(g.add_node(Pose2(r.x + dx, r.y), NodeKind::WAYPOINT));
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      forward.push_back(g.add_edge(nodes[i], nodes[i + 1], BehaviorKind::GOTO, {}, offsets[i + 1] - offsets[i]));
    }
  }
};

// Door approach and landing nodes either side of the mock-lab door.
struct DoorRig {
  WorldModel world = load_scenario_file(kMockLab);
  SituationalGraph g;
  ObjectId door = first(world, ObjectLabel::DOOR);
  NodeId before, beyond;
  EdgeId open;

  DoorRig() {
    const Point2 d = world.objects().at(door).pose.position();
    before = g.add_node(Pose2(d.x, d.y + 1.0, -std::numbers::pi / 2), NodeKind::WAYPOINT);
    beyond = g.add_node(Pose2(d.x, d.y - 1.0, -std::numbers::pi / 2), NodeKind::WAYPOINT);
    g.update_situation(before, {}, {world.objects().at(door)});
    open = g.add_edge(before, beyond, BehaviorKind::OPEN_DOOR, {door}, 5.0);
    world.robot().pose = g.node(before).pose;
  }
};

}  // namespace

TEST(Executor, GotoFourMetres) {
  WorldModel w = corridor();
  Line l(w, {0.0, 4.0});
  const auto out = execute_goto(w, l.g.edge(l.forward[0]), l.g);
  EXPECT_EQ(out.status, OutcomeStatus::SUCCEEDED);
  // 4 m at 1 m/s and 0.1 s per step, stopping 0.3 m short at the latest.
  EXPECT_GE(out.steps_taken, 37u);
  EXPECT_LE(out.steps_taken, 40u);
  EXPECT_LE(distance(w.robot().pose, l.g.node(l.nodes[1]).pose), 0.3);
}

TEST(Executor, GotoAlreadyThere) {
  WorldModel w = corridor();
  Line l(w, {0.0, 0.2});
  const auto out = execute_goto(w, l.g.edge(l.forward[0]), l.g);
  EXPECT_EQ(out.status, OutcomeStatus::SUCCEEDED);
  EXPECT_EQ(out.steps_taken, 0u);
}

TEST(Executor, GotoBlockedByClosedDoorFails) {
  WorldModel w = corridor('d');
  Line l(w, {0.0, 8.0});
  w.set_door(first(w, ObjectLabel::DOOR), DoorState::CLOSED);
  const auto out = execute_goto(w, l.g.edge(l.forward[0]), l.g);
  EXPECT_EQ(out.status, OutcomeStatus::FAILED);
  EXPECT_NE(out.detail.find("progress"), std::string::npos);
  EXPECT_LT(w.robot().pose.x, w.objects().at(first(w, ObjectLabel::DOOR)).pose.x);
  EXPECT_TRUE(w.disk_free(w.robot().pose.position(), w.robot().radius));
}

TEST(Executor, GotoPreconditions) {
  WorldModel w = corridor();
  Line l(w, {2.0, 5.0});
  EXPECT_THROW(execute_goto(w, l.g.edge(l.forward[0]), l.g), NotAtSource);
  Line here(w, {0.0, 3.0});
  here.g.update_situation(here.nodes[0], {}, {make_object(9, ObjectLabel::CONTAINER, {0, 0})});
  const EdgeId t = here.g.add_edge(here.nodes[0], here.nodes[0], BehaviorKind::REQUEST_TELEOP, {ObjectId{9}}, 1.0);
  EXPECT_THROW(execute_goto(w, here.g.edge(t), here.g), WrongBehavior);
  EXPECT_THROW(execute_open_door(w, here.g.edge(here.forward[0]), here.g), WrongBehavior);
}

TEST(Executor, OpenMockLabDoor) {
  DoorRig r;
  const auto out = execute_open_door(r.world, r.g.edge(r.open), r.g);
  EXPECT_EQ(out.status, OutcomeStatus::SUCCEEDED);
  EXPECT_EQ(r.world.doors().at(r.door).state, DoorState::OPEN);
  const Point2 d = r.world.objects().at(r.door).pose.position();
  EXPECT_NEAR(d.y - r.world.robot().pose.y, 1.0, 0.3);
  EXPECT_GE(out.steps_taken, 20u);
}

TEST(Executor, OpenDoorEmitsStateChange) {
  DoorRig r;
  std::vector<PerceptionEvent> seen;
  execute_open_door(r.world, r.g.edge(r.open), r.g, {}, [&](WorldModel&, const std::vector<PerceptionEvent>& ev) {
    seen.insert(seen.end(), ev.begin(), ev.end());
  });
  ASSERT_EQ(seen.size(), 1u);
  const auto& c = std::get<PerceptionEvent::DoorStateChanged>(seen[0].payload);
  EXPECT_EQ(c.door, r.door);
  EXPECT_EQ(c.state, DoorState::OPEN);
}

TEST(Executor, OpenDoorAlreadyOpen) {
  DoorRig r;
  r.world.set_door(r.door, DoorState::OPEN);
  const auto out = execute_open_door(r.world, r.g.edge(r.open), r.g);
  EXPECT_EQ(out.status, OutcomeStatus::SUCCEEDED);
  EXPECT_LT(out.steps_taken, 20u);
}

TEST(Executor, OpenDoorTooFar) {
  DoorRig r;
  r.world.robot().pose = Pose2(r.world.robot().pose.x, r.world.robot().pose.y + 5.0);
  EXPECT_THROW(execute_open_door(r.world, r.g.edge(r.open), r.g), TooFarFromDoor);
}

TEST(Executor, OpenDoorMissing) {
  DoorRig r;
  SituationalGraph g;
  const NodeId a = g.add_node(r.g.node(r.before).pose, NodeKind::WAYPOINT);
  const NodeId b = g.add_node(r.g.node(r.beyond).pose, NodeKind::WAYPOINT);
  g.update_situation(a, {}, {r.world.objects().at(r.door)});
  const EdgeId e = g.add_edge(a, b, BehaviorKind::OPEN_DOOR, {r.door}, 5.0);
  const Edge edge = g.edge(e);
  g.remove_edge(e);
  g.update_situation(a, {}, {});
  EXPECT_THROW(execute_open_door(r.world, edge, g), DoorMissing);
}

TEST(Executor, TeleopReleasedAfterTenSteps) {
  Edge e;
  e.id = EdgeId{7};
  e.behavior = BehaviorKind::REQUEST_TELEOP;
  const auto out = execute_request_teleop(e, [](std::uint64_t waited) -> std::optional<TeleopResolution> {
    if (waited == 10) return TeleopResolution::RELEASED;
    return std::nullopt;
  });
  EXPECT_EQ(out.status, OutcomeStatus::SUCCEEDED);
  EXPECT_EQ(out.steps_taken, 10u);
}

TEST(Executor, TeleopEndedByLevelChange) {
  Edge e;
  e.behavior = BehaviorKind::REQUEST_TELEOP;
  const auto out = execute_request_teleop(
      e, [](std::uint64_t waited) -> std::optional<TeleopResolution> {
        if (waited == 3) return TeleopResolution::LEVEL_CHANGED;
        return std::nullopt;
      });
  EXPECT_EQ(out.status, OutcomeStatus::PREEMPTED);
  Edge g;
  g.behavior = BehaviorKind::GOTO;
  EXPECT_THROW(execute_request_teleop(g, {}), WrongBehavior);
}

TEST(Executor, PreemptRunningGoto) {
  WorldModel w = corridor();
  Line l(w, {0.0, 6.0});
  auto b = RunningBehavior::start(w, l.g, l.g.edge(l.forward[0]));
  std::vector<PerceptionEvent> ev;
  for (int i = 0; i < 5; ++i) EXPECT_FALSE(b.tick(w, ev).has_value());
  const auto out = b.preempt("autonomy level changed");
  EXPECT_EQ(out.status, OutcomeStatus::PREEMPTED);
  EXPECT_EQ(out.steps_taken, 5u);
}

TEST(Executor, PlanAlongLine) {
  WorldModel w = corridor();
  Line l(w, {0.0, 3.0, 6.0, 9.0});
  const Plan p = plan_path(l.g, l.nodes[0], l.nodes[3]);
  int cycles = 0;
  const auto outs = execute_plan(w, p, l.g, {}, {}, {}, [&] { ++cycles; });
  ASSERT_EQ(outs.size(), 3u);
  for (const auto& o : outs) EXPECT_EQ(o.status, OutcomeStatus::SUCCEEDED);
  EXPECT_EQ(cycles, 3);
  EXPECT_LE(distance(w.robot().pose, l.g.node(l.nodes[3]).pose), 0.3);
}

TEST(Executor, EmptyPlan) {
  WorldModel w = corridor();
  Line l(w, {0.0});
  EXPECT_TRUE(execute_plan(w, Plan{l.nodes[0], l.nodes[0], {}, 0.0}, l.g, {}).empty());
}

TEST(Executor, PlanGoesStale) {
  WorldModel w = corridor();
  Line l(w, {0.0, 3.0, 6.0});
  const Plan p = plan_path(l.g, l.nodes[0], l.nodes[2]);
  EXPECT_THROW(execute_plan(w, p, l.g, {}, {}, {}, [&] {
                 if (l.g.has_edge(l.forward[1])) l.g.remove_edge(l.forward[1]);
               }),
               StalePlan);
}

TEST(Executor, PlanStopsAtFirstFailure) {
  WorldModel w = corridor('d');
  Line l(w, {0.0, 8.0, 10.0});
  w.set_door(first(w, ObjectLabel::DOOR), DoorState::CLOSED);
  const auto outs = execute_plan(w, plan_path(l.g, l.nodes[0], l.nodes[2]), l.g, {});
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_EQ(outs[0].status, OutcomeStatus::FAILED);
}

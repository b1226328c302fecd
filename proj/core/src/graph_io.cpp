#include "bosg/graph_io.hpp"

#include "bosg/errors.hpp"

namespace bosg {

json to_json(const Pose2& p) { return {{"x", p.x}, {"y", p.y}, {"theta", p.theta}}; }

json to_json(const Pose3& p) {
  return {{"x", p.x}, {"y", p.y}, {"z", p.z}, {"roll", p.roll}, {"pitch", p.pitch}, {"yaw", p.yaw}};
}

json to_json(const WorldObject& o) {
  json j = {{"id", o.id.value}, {"label", to_string(o.label)}, {"pose", to_json(o.pose)}};
  if (o.state) j["state"] = to_string(*o.state);
  return j;
}

json to_json(const Edge& e) {
  json params = json::array();
  for (ObjectId o : e.object_params) params.push_back(o.value);
  return {{"id", e.id.value},         {"source", e.source.value},
          {"target", e.target.value}, {"behavior", to_string(e.behavior)},
          {"object_params", params},  {"cost", e.cost}};
}

json to_json(const GridMap& g) {
  return {{"width", g.width()},
          {"height", g.height()},
          {"resolution", g.resolution()},
          {"origin", to_json(g.origin())},
          {"cells", g.to_rle()}};
}

json to_json(const Node& n, bool with_gridmap) {
  json objects = json::array();
  for (const auto& o : n.situation().objects) objects.push_back(to_json(o));
  json j = {{"id", n.id.value}, {"kind", to_string(n.kind)}, {"pose", to_json(n.pose)}, {"objects", objects}};
  if (with_gridmap) j["gridmap"] = to_json(n.situation().gridmap);
  return j;
}

json snapshot_to_json(const GraphState& g, bool with_gridmaps) {
  json nodes = json::array();
  for (const auto& [id, n] : g.nodes()) nodes.push_back(to_json(n, with_gridmaps));
  json edges = json::array();
  for (const auto& [id, e] : g.edges()) edges.push_back(to_json(e));
  return {{"revision", g.revision()}, {"nodes", nodes}, {"edges", edges}};
}

namespace {

json situation_payload(NodeId id, NodeKind kind, const Situation& s) {
  json objects = json::array();
  for (const auto& o : s.objects) objects.push_back(to_json(o));
  return {{"node", id.value}, {"kind", to_string(kind)}, {"objects", objects}, {"gridmap", to_json(s.gridmap)}};
}

std::vector<WorldObject> objects_from_json(const json& j) {
  std::vector<WorldObject> out;
  for (const auto& o : j) out.push_back(object_from_json(o));
  return out;
}

}  // namespace

json to_json(const GraphDelta& d) {
  struct Visitor {
    json operator()(const GraphDelta::NodeAdded& x) const {
      json j = to_json(x.node, true);
      if (!x.reason.empty()) j["reason"] = x.reason;
      return j;
    }
    json operator()(const GraphDelta::NodeRemoved& x) const { return {{"node", x.id.value}}; }
    json operator()(const GraphDelta::EdgeAdded& x) const { return to_json(x.edge); }
    json operator()(const GraphDelta::EdgeRemoved& x) const { return {{"edge", x.id.value}}; }
    json operator()(const GraphDelta::SituationUpdated& x) const {
      return situation_payload(x.id, x.kind, x.situation ? *x.situation : Situation{});
    }
  };
  return {{"type", d.type()}, {"payload", std::visit(Visitor{}, d.change)}, {"revision", d.revision}};
}

Pose2 pose2_from_json(const json& j) {
  return Pose2(j.at("x").get<double>(), j.at("y").get<double>(), j.value("theta", 0.0));
}

Pose3 pose3_from_json(const json& j) {
  Pose3 p;
  p.x = j.at("x").get<double>();
  p.y = j.at("y").get<double>();
  p.z = j.value("z", 0.0);
  p.roll = j.value("roll", 0.0);
  p.pitch = j.value("pitch", 0.0);
  p.yaw = j.value("yaw", 0.0);
  return p;
}

WorldObject object_from_json(const json& j) {
  WorldObject o;
  o.id = ObjectId{j.at("id").get<std::uint64_t>()};
  o.label = object_label_from(j.at("label").get<std::string>());
  o.pose = pose3_from_json(j.at("pose"));
  if (j.contains("state")) o.state = door_state_from(j.at("state").get<std::string>());
  validate_object(o);
  return o;
}

Edge edge_from_json(const json& j) {
  Edge e;
  e.id = EdgeId{j.at("id").get<std::uint64_t>()};
  e.source = NodeId{j.at("source").get<std::uint64_t>()};
  e.target = NodeId{j.at("target").get<std::uint64_t>()};
  e.behavior = behavior_from(j.at("behavior").get<std::string>());
  for (const auto& p : j.at("object_params")) e.object_params.emplace_back(p.get<std::uint64_t>());
  e.cost = j.at("cost").get<double>();
  return e;
}

GridMap gridmap_from_json(const json& j) {
  return GridMap::from_rle(j.at("width").get<int>(), j.at("height").get<int>(), j.at("resolution").get<double>(),
                           pose2_from_json(j.at("origin")), j.at("cells").get<std::string>());
}

Node node_from_json(const json& j) {
  Node n;
  n.id = NodeId{j.at("id").get<std::uint64_t>()};
  n.kind = node_kind_from(j.at("kind").get<std::string>());
  n.pose = pose2_from_json(j.at("pose"));
  GridMap grid;
  if (j.contains("gridmap")) grid = gridmap_from_json(j.at("gridmap"));
  n.situation_ptr = std::make_shared<const Situation>(std::move(grid), objects_from_json(j.at("objects")));
  return n;
}

GraphSnapshot snapshot_from_json(const json& j) try {
  std::vector<Node> nodes;
  for (const auto& n : j.at("nodes")) nodes.push_back(node_from_json(n));
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) edges.push_back(edge_from_json(e));
  return GraphSnapshot::from_parts(j.at("revision").get<std::uint64_t>(), std::move(nodes), std::move(edges));
} catch (const json::exception& e) {
  throw InvariantViolation(std::string("malformed snapshot: ") + e.what());
}

GraphDelta delta_from_json(const json& j) try {
  GraphDelta d;
  d.revision = j.at("revision").get<std::uint64_t>();
  const auto type = j.at("type").get<std::string>();
  const json& p = j.at("payload");
  if (type == "node_added") {
    d.change = GraphDelta::NodeAdded{node_from_json(p), p.value("reason", std::string{})};
  } else if (type == "node_removed") {
    d.change = GraphDelta::NodeRemoved{NodeId{p.at("node").get<std::uint64_t>()}};
  } else if (type == "edge_added") {
    d.change = GraphDelta::EdgeAdded{edge_from_json(p)};
  } else if (type == "edge_removed") {
    d.change = GraphDelta::EdgeRemoved{EdgeId{p.at("edge").get<std::uint64_t>()}};
  } else if (type == "situation_updated") {
    d.change = GraphDelta::SituationUpdated{
        NodeId{p.at("node").get<std::uint64_t>()}, node_kind_from(p.at("kind").get<std::string>()),
        std::make_shared<const Situation>(gridmap_from_json(p.at("gridmap")), objects_from_json(p.at("objects")))};
  } else {
    throw InvariantViolation("unknown delta type " + type);
  }
  return d;
} catch (const json::exception& e) {
  throw InvariantViolation(std::string("malformed delta: ") + e.what());
}

}  // namespace bosg

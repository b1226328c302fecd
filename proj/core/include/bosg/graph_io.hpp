#pragma once

#include <nlohmann/json.hpp>

#include "bosg/graph.hpp"

namespace bosg {

using json = nlohmann::json;

json to_json(const Pose2& p);
json to_json(const Pose3& p);
json to_json(const WorldObject& o);
json to_json(const Edge& e);
/// {width, height, resolution, origin, cells: run-length string}
json to_json(const GridMap& g);
/// Node record; the gridmap is embedded only when requested.
json to_json(const Node& n, bool with_gridmap = false);
/// {revision, nodes, edges}
json snapshot_to_json(const GraphState& g, bool with_gridmaps = false);
/// {type, payload, revision}
json to_json(const GraphDelta& d);

Pose2 pose2_from_json(const json& j);
Pose3 pose3_from_json(const json& j);
WorldObject object_from_json(const json& j);
Edge edge_from_json(const json& j);
GridMap gridmap_from_json(const json& j);
Node node_from_json(const json& j);
GraphSnapshot snapshot_from_json(const json& j);
GraphDelta delta_from_json(const json& j);

}  // namespace bosg

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "bosg/events.hpp"
#include "bosg/graph.hpp"

namespace bosg {

struct ReplayResult {
  std::optional<json> header;
  SituationalGraph graph;
  std::size_t events = 0;
  std::uint64_t last_step = 0;
  bool mission_complete = false;
};

/// Rebuilds the graph from the graph_delta events of a log. `visit` sees each
/// event after it has been applied. Throws CorruptLog on bad input.
ReplayResult replay(const EventLog& log, const std::function<void(const MissionEvent&, const GraphState&)>& visit = {});
ReplayResult replay_file(const std::string& path,
                         const std::function<void(const MissionEvent&, const GraphState&)>& visit = {});

}  // namespace bosg

#include "bosg/replay.hpp"

#include "bosg/errors.hpp"

namespace bosg {

ReplayResult replay(const EventLog& log, const std::function<void(const MissionEvent&, const GraphState&)>& visit) {
  ReplayResult out;
  out.header = log.header;
  for (const auto& e : log.events) {
    if (e.kind == EventKind::GRAPH_DELTA) {
      try {
        out.graph.apply(delta_from_json(e.payload));
      } catch (const std::exception& ex) {
        throw CorruptLog(0, "event seq " + std::to_string(e.seq) + ": " + ex.what());
      }
    } else if (e.kind == EventKind::MISSION_COMPLETE) {
      out.mission_complete = true;
    }
    ++out.events;
    out.last_step = e.step;
    if (visit) visit(e, out.graph);
  }
  out.graph.take_deltas();
  return out;
}

ReplayResult replay_file(const std::string& path,
                         const std::function<void(const MissionEvent&, const GraphState&)>& visit) {
  return replay(read_event_log(path), visit);
}

}  // namespace bosg

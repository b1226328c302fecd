#include <CLI11.hpp>
#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>

#include "bosg/errors.hpp"
#include "bosg/mission.hpp"
#include "bosg/replay.hpp"
#include "bosg/server.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

bosg::MissionConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw bosg::Error("cannot read config " + path);
  return bosg::mission_config_from_json(bosg::json::parse(in));
}

void print_summary(const bosg::MissionSummary& s) {
  std::cout << "outcome: " << bosg::to_string(s.status) << "\n"
            << "steps: " << s.steps << "\n"
            << "coverage: " << s.coverage << "\n"
            << "frontiers_remaining: " << s.frontiers_remaining << "\n"
            << "nodes: " << s.nodes << "\n"
            << "edges: " << s.edges << "\n"
            << "revision: " << s.revision << "\n";
}

int exit_code(bosg::MissionStatus s) { return s == bosg::MissionStatus::COMPLETE ? 0 : 2; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavior-oriented situational graph mission runner"};
  app.require_subcommand(1);

  std::string scenario, log_path, config_path;
  int autonomy = 1;
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  auto* run = app.add_subcommand("run", "Run a mission headless");
  run->add_option("--scenario", scenario, "Scenario file")->required();
  run->add_option("--autonomy", autonomy, "Initial autonomy level 1..4")->check(CLI::Range(1, 4));
  run->add_option("--seed", seed, "Random seed");
  run->add_option("--log", log_path, "Event log output")->required();
  run->add_option("--steps", steps, "Step limit");
  run->add_option("--config", config_path, "JSON config file");

  int port = 8765;
  auto* serve = app.add_subcommand("serve", "Run a mission and serve it over WebSocket");
  serve->add_option("--scenario", scenario, "Scenario file")->required();
  serve->add_option("--port", port, "TCP port")->required()->check(CLI::Range(0, 65535));
  serve->add_option("--seed", seed, "Random seed");
  serve->add_option("--log", log_path, "Event log output");
  serve->add_option("--autonomy", autonomy, "Initial autonomy level 1..4")->check(CLI::Range(1, 4));
  serve->add_option("--config", config_path, "JSON config file");

  double speed = 1.0;
  std::optional<int> replay_port;
  auto* rep = app.add_subcommand("replay", "Rebuild a mission from its event log");
  rep->add_option("--log", log_path, "Event log")->required();
  rep->add_option("--port", replay_port, "Stream the log over WebSocket on this port");
  rep->add_option("--speed", speed, "Playback speed multiplier")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  try {
    if (*run || *serve) {
      bosg::MissionConfig config = load_config(config_path);
      config.scenario_path = scenario;
      config.level = bosg::autonomy_from_int(autonomy);
      if (!log_path.empty()) config.log_path = log_path;
      if (seed != 0 || config.seed == 0) config.seed = seed;
      if (steps != 0) config.step_limit = steps;
      bosg::Mission mission(config);
      if (*run) {
        const auto summary = mission.run();
        print_summary(summary);
        return exit_code(summary.status);
      }
      bosg::MissionServer server(mission);
      const auto bound = server.start(static_cast<std::uint16_t>(port));
      std::cout << "serving on ws://127.0.0.1:" << bound << std::endl;
      server.run(std::chrono::milliseconds(static_cast<int>(config.executor.dt * 1000.0)), g_stop, true);
      server.stop();
      print_summary(mission.summary());
      return exit_code(mission.status());
    }

    auto log = bosg::read_event_log(log_path);
    if (replay_port) {
      bosg::ReplayServer server(log, speed);
      const auto bound = server.start(static_cast<std::uint16_t>(*replay_port));
      std::cout << "replaying on ws://127.0.0.1:" << bound << std::endl;
      server.run(g_stop, false);
      server.stop();
    }
    const auto result = bosg::replay(log);
    std::cout << "events: " << result.events << "\n"
              << "last_step: " << result.last_step << "\n"
              << "revision: " << result.graph.revision() << "\n"
              << "nodes: " << result.graph.nodes().size() << "\n"
              << "edges: " << result.graph.edges().size() << "\n"
              << "mission_complete: " << (result.mission_complete ? "true" : "false") << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

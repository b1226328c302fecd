#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>

#include "bosg/events.hpp"
#include "bosg/mission.hpp"

namespace bosg {

/// WebSocket endpoint speaking JSON text frames. Runs its own I/O thread.
class WsServer {
 public:
  using MessageHandler = std::function<void(std::uint64_t client, const std::string& text)>;
  /// Called on join; returns the first message for the new client. Runs
  /// before the client is added to the broadcast set.
  using JoinHandler = std::function<std::string(std::uint64_t client)>;

  WsServer();
  ~WsServer();
  WsServer(const WsServer&) = delete;
  WsServer& operator=(const WsServer&) = delete;

  void on_message(MessageHandler h);
  void on_join(JoinHandler h);

  /// Binds to 127.0.0.1:`port` (0 picks a free port) and returns the bound
  /// port. Throws BindError.
  std::uint16_t start(std::uint16_t port, const std::string& address = "127.0.0.1");
  void stop();

  void broadcast(const std::string& text);
  void send(std::uint64_t client, const std::string& text);
  std::size_t client_count() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

/// Publishes a running mission to WebSocket clients and feeds their commands
/// back into it.
class MissionServer {
 public:
  explicit MissionServer(Mission& mission);
  ~MissionServer();

  std::uint16_t start(std::uint16_t port);
  void stop();

  /// One mission step followed by a robot_state broadcast.
  MissionStatus step();

  /// Steps at `period` per step until the mission ends or `stop_flag` is set.
  /// With `linger` the server keeps serving after the mission ends.
  void run(std::chrono::milliseconds period, const std::atomic<bool>& stop_flag, bool linger);

  WsServer& socket() { return ws_; }

 private:
  std::string envelope(const char* type, json body);
  void handle_event(const MissionEvent& e);
  void handle_message(std::uint64_t client, const std::string& text);
  std::string snapshot_message();

  Mission& mission_;
  WsServer ws_;
  std::atomic<std::uint64_t> seq_{0};
};

/// Streams a recorded log to WebSocket clients at `speed` times real time.
class ReplayServer {
 public:
  ReplayServer(EventLog log, double speed, double dt = 0.1);

  std::uint16_t start(std::uint16_t port);
  void stop();
  /// Blocks until the log is exhausted or `stop_flag` is set.
  void run(const std::atomic<bool>& stop_flag, bool linger);

  WsServer& socket() { return ws_; }

 private:
  EventLog log_;
  double speed_;
  double dt_;
  std::mutex mutex_;
  SituationalGraph graph_;
  std::uint64_t step_ = 0;
  std::uint64_t seq_ = 0;
  WsServer ws_;
};

}  // namespace bosg

#include "bosg/server.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include "bosg/errors.hpp"
#include "bosg/replay.hpp"

namespace bosg {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

class Session : public std::enable_shared_from_this<Session> {
 public:
  using Closed = std::function<void(std::uint64_t)>;
  using Opened = std::function<void(const std::shared_ptr<Session>&)>;

  Session(tcp::socket socket, std::uint64_t id) : ws_(std::move(socket)), id_(id) {}

  std::uint64_t id() const { return id_; }

  void run(Opened opened, WsServer::MessageHandler on_message, Closed closed) {
    opened_ = std::move(opened);
    on_message_ = std::move(on_message);
    closed_ = std::move(closed);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->close();
      self->ws_.text(true);
      self->opened_(self);
      self->read();
    });
  }

  /// Thread-safe; writes are serialized on the session's executor.
  void send(std::shared_ptr<const std::string> text) {
    asio::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)] {
      self->queue_.push_back(text);
      if (self->queue_.size() == 1) self->write();
    });
  }

  void shutdown() {
    asio::post(ws_.get_executor(), [self = shared_from_this()] {
      beast::error_code ec;
      beast::get_lowest_layer(self->ws_).socket().close(ec);
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      if (self->on_message_) self->on_message_(self->id_, text);
      self->read();
    });
  }

  void write() {
    ws_.async_write(asio::buffer(*queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write();
    });
  }

  void close() {
    if (closed_flag_) return;
    closed_flag_ = true;
    if (closed_) closed_(id_);
  }

  websocket::stream<beast::tcp_stream> ws_;
  std::uint64_t id_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  Opened opened_;
  WsServer::MessageHandler on_message_;
  Closed closed_;
  bool closed_flag_ = false;
};

}  // namespace

struct WsServer::Impl : std::enable_shared_from_this<WsServer::Impl> {
  asio::io_context ioc{1};
  std::optional<tcp::acceptor> acceptor;
  std::thread thread;
  mutable std::mutex mutex;
  std::map<std::uint64_t, std::shared_ptr<Session>> sessions;
  std::uint64_t next_id = 1;
  MessageHandler on_message;
  JoinHandler on_join;
  bool running = false;

  void accept() {
    acceptor->async_accept(asio::make_strand(ioc), [self = shared_from_this()](beast::error_code ec, tcp::socket s) {
      if (ec) return;
      std::uint64_t id;
      {
        std::lock_guard lock(self->mutex);
        id = self->next_id++;
      }
      auto session = std::make_shared<Session>(std::move(s), id);
      std::weak_ptr<Impl> weak = self;
      session->run(
          [weak](const std::shared_ptr<Session>& ses) {
            auto impl = weak.lock();
            if (!impl) return;
            std::string first = impl->on_join ? impl->on_join(ses->id()) : std::string{};
            std::lock_guard lock(impl->mutex);
            if (!first.empty()) ses->send(std::make_shared<const std::string>(std::move(first)));
            impl->sessions[ses->id()] = ses;
          },
          self->on_message,
          [weak](std::uint64_t sid) {
            if (auto impl = weak.lock()) {
              std::lock_guard lock(impl->mutex);
              impl->sessions.erase(sid);
            }
          });
      self->accept();
    });
  }
};

WsServer::WsServer() : impl_(std::make_shared<Impl>()) {}

WsServer::~WsServer() { stop(); }

void WsServer::on_message(MessageHandler h) { impl_->on_message = std::move(h); }
void WsServer::on_join(JoinHandler h) { impl_->on_join = std::move(h); }

std::uint16_t WsServer::start(std::uint16_t port, const std::string& address) {
  if (impl_->running) throw BindError("server already started");
  try {
    const tcp::endpoint ep(asio::ip::make_address(address), port);
    impl_->acceptor.emplace(impl_->ioc);
    impl_->acceptor->open(ep.protocol());
    impl_->acceptor->set_option(asio::socket_base::reuse_address(true));
    impl_->acceptor->bind(ep);
    impl_->acceptor->listen(asio::socket_base::max_listen_connections);
  } catch (const boost::system::system_error& e) {
    impl_->acceptor.reset();
    throw BindError("cannot bind " + address + ":" + std::to_string(port) + ": " + e.what());
  }
  const std::uint16_t bound = impl_->acceptor->local_endpoint().port();
  impl_->accept();
  impl_->running = true;
  impl_->thread = std::thread([impl = impl_] { impl->ioc.run(); });
  return bound;
}

void WsServer::stop() {
  if (!impl_->running) return;
  impl_->running = false;
  asio::post(impl_->ioc, [impl = impl_] {
    beast::error_code ec;
    impl->acceptor->close(ec);
  });
  {
    std::lock_guard lock(impl_->mutex);
    for (auto& [id, s] : impl_->sessions) s->shutdown();
    impl_->sessions.clear();
  }
  impl_->ioc.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void WsServer::broadcast(const std::string& text) {
  auto shared = std::make_shared<const std::string>(text);
  std::lock_guard lock(impl_->mutex);
  for (auto& [id, s] : impl_->sessions) s->send(shared);
}

void WsServer::send(std::uint64_t client, const std::string& text) {
  std::lock_guard lock(impl_->mutex);
  auto it = impl_->sessions.find(client);
  if (it != impl_->sessions.end()) it->second->send(std::make_shared<const std::string>(text));
}

std::size_t WsServer::client_count() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->sessions.size();
}

// Mission server ---------------------------------------------------------------

MissionServer::MissionServer(Mission& mission) : mission_(mission) {
  mission_.set_event_sink([this](const MissionEvent& e) { handle_event(e); });
  ws_.on_join([this](std::uint64_t) { return snapshot_message(); });
  ws_.on_message([this](std::uint64_t client, const std::string& text) { handle_message(client, text); });
}

MissionServer::~MissionServer() {
  stop();
  mission_.set_event_sink({});
}

std::uint16_t MissionServer::start(std::uint16_t port) { return ws_.start(port); }
void MissionServer::stop() { ws_.stop(); }

std::string MissionServer::envelope(const char* type, json body) {
  body["type"] = type;
  body["seq"] = seq_++;
  if (!body.contains("step")) body["step"] = mission_.world().step_index();
  return body.dump();
}

std::string MissionServer::snapshot_message() {
  std::lock_guard lock(mission_.mutex());
  return envelope("snapshot", {{"graph", snapshot_to_json(mission_.graph())},
                               {"level", to_int(mission_.level())},
                               {"robot", to_json(mission_.world().robot())},
                               {"paused", mission_.paused()}});
}

void MissionServer::handle_event(const MissionEvent& e) {
  switch (e.kind) {
    case EventKind::GRAPH_DELTA:
      ws_.broadcast(envelope("graph_delta", {{"step", e.step}, {"delta", e.payload}}));
      return;
    case EventKind::PLAN:
      ws_.broadcast(envelope("plan", {{"step", e.step}, {"plan", e.payload}}));
      return;
    case EventKind::PERCEPTION:
      return;  // robot_state carries the pose; raw sensing stays in the log
    default:
      break;
  }
  if (e.kind == EventKind::NOTIFICATION && e.payload.value("type", "") == "command_rejected" &&
      e.payload.contains("origin")) {
    ws_.send(e.payload.at("origin").get<std::uint64_t>(),
             envelope("error", {{"step", e.step}, {"reason", e.payload.at("reason")}}));
  }
  ws_.broadcast(envelope("event", {{"step", e.step}, {"event", e.to_json()}}));
}

void MissionServer::handle_message(std::uint64_t client, const std::string& text) {
  try {
    mission_.submit(command_from_json(json::parse(text)), client);
  } catch (const std::exception& e) {
    ws_.send(client, envelope("error", {{"reason", std::string("malformed command: ") + e.what()}}));
  }
}

MissionStatus MissionServer::step() {
  const MissionStatus s = mission_.step();
  std::lock_guard lock(mission_.mutex());
  ws_.broadcast(envelope("robot_state", {{"pose", to_json(mission_.world().robot().pose)},
                                         {"level", to_int(mission_.level())},
                                         {"paused", mission_.paused()},
                                         {"status", to_string(s)}}));
  return s;
}

void MissionServer::run(std::chrono::milliseconds period, const std::atomic<bool>& stop_flag, bool linger) {
  auto next = std::chrono::steady_clock::now();
  while (!stop_flag) {
    if (step() != MissionStatus::RUNNING) break;
    next += period;
    std::this_thread::sleep_until(next);
  }
  while (linger && !stop_flag) std::this_thread::sleep_for(std::chrono::milliseconds(50));
}

// Replay server ----------------------------------------------------------------

ReplayServer::ReplayServer(EventLog log, double speed, double dt) : log_(std::move(log)), speed_(speed), dt_(dt) {
  if (!(speed_ > 0.0)) throw InvariantViolation("replay speed must be positive");
  ws_.on_message([this](std::uint64_t client, const std::string&) {
    std::lock_guard lock(mutex_);
    ws_.send(client,
             json{{"type", "error"}, {"seq", seq_++}, {"step", step_}, {"reason", "replay is read-only"}}.dump());
  });
  ws_.on_join([this](std::uint64_t) {
    std::lock_guard lock(mutex_);
    return json{{"type", "snapshot"}, {"seq", seq_++}, {"step", step_}, {"graph", snapshot_to_json(graph_)}}.dump();
  });
}

std::uint16_t ReplayServer::start(std::uint16_t port) { return ws_.start(port); }
void ReplayServer::stop() { ws_.stop(); }

void ReplayServer::run(const std::atomic<bool>& stop_flag, bool linger) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t first_step = log_.events.empty() ? 0 : log_.events.front().step;
  for (const auto& e : log_.events) {
    if (stop_flag) break;
    const auto due = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(static_cast<double>(e.step - first_step) * dt_ / speed_));
    std::this_thread::sleep_until(due);
    std::lock_guard lock(mutex_);
    step_ = e.step;
    json msg;
    if (e.kind == EventKind::GRAPH_DELTA) {
      graph_.apply(delta_from_json(e.payload));
      msg = {{"type", "graph_delta"}, {"delta", e.payload}};
    } else if (e.kind == EventKind::PLAN) {
      msg = {{"type", "plan"}, {"plan", e.payload}};
    } else if (e.kind == EventKind::PERCEPTION) {
      if (e.payload.value("type", "") != "pose_update") continue;
      msg = {{"type", "robot_state"}, {"pose", e.payload.at("pose")}};
    } else {
      msg = {{"type", "event"}, {"event", e.to_json()}};
    }
    msg["seq"] = seq_++;
    msg["step"] = e.step;
    ws_.broadcast(msg.dump());
  }
  while (linger && !stop_flag) std::this_thread::sleep_for(std::chrono::milliseconds(50));
}

}  // namespace bosg

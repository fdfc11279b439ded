#include "whmc/server.hpp"

#include <atomic>
#include <boost/asio/dispatch.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/version.hpp>
#include <boost/beast/websocket.hpp>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "whmc/scenario_io.hpp"
#include "whmc/session.hpp"

namespace whmc::session {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

ServerConfig config_from_environment(ServerConfig defaults) {
  if (const char* bind = std::getenv("WHMC_BIND")) defaults.bind_address = bind;
  if (const char* port = std::getenv("WHMC_PORT")) {
    defaults.port = static_cast<std::uint16_t>(std::stoul(port));
  }
  if (const char* dir = std::getenv("WHMC_STATIC_DIR")) defaults.static_dir = dir;
  return defaults;
}

namespace {

std::atomic<std::uint64_t> g_session_counter{0};

std::string presets_body() {
  nlohmann::json body = nlohmann::json::array();
  for (const auto& name : io::preset_names()) {
    body.push_back({{"name", name}, {"scenario", io::to_json(io::preset(name))}});
  }
  return nlohmann::json{{"presets", body}}.dump();
}

std::string mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

class WebSocketSession : public std::enable_shared_from_this<WebSocketSession> {
 public:
  explicit WebSocketSession(tcp::socket&& socket)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        logic_("s" + std::to_string(++g_session_counter)) {}

  void run(http::request<http::string_body> request) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(request, beast::bind_front_handler(&WebSocketSession::on_accept,
                                                        shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    ws_.text(true);
    read();
  }

  void read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WebSocketSession::on_read,
                                                      shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      closed_ = true;
      timer_.cancel();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    const Phase before = logic_.phase();
    send(logic_.handle_message(text));
    const Phase after = logic_.phase();
    if (after == Phase::kRunning && before != Phase::kRunning) {
      if (!pacer_) {
        pacer_.emplace(logic_.control_period(), logic_.pacing_factor(), Pacer::Clock::now());
      } else {
        pacer_->rebase(Pacer::Clock::now());
      }
      schedule_tick();
    }
    read();
  }

  void schedule_tick() {
    if (closed_ || logic_.phase() != Phase::kRunning) return;
    timer_.expires_at(pacer_->next_deadline());
    timer_.async_wait(beast::bind_front_handler(&WebSocketSession::on_tick, shared_from_this()));
  }

  void on_tick(beast::error_code ec) {
    if (ec || closed_) return;
    if (logic_.phase() != Phase::kRunning) return;
    send(logic_.tick());
    pacer_->on_tick();
    schedule_tick();
  }

  void send(std::vector<nlohmann::json> messages) {
    for (auto& m : messages) outbox_.push_back(m.dump());
    if (!writing_) write_next();
  }

  void write_next() {
    if (outbox_.empty() || closed_) {
      writing_ = false;
      return;
    }
    writing_ = true;
    ws_.async_write(asio::buffer(outbox_.front()),
                    beast::bind_front_handler(&WebSocketSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      closed_ = true;
      timer_.cancel();
      return;
    }
    outbox_.pop_front();
    write_next();
  }

  websocket::stream<beast::tcp_stream> ws_;
  asio::steady_timer timer_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  bool writing_ = false;
  bool closed_ = false;
  Session logic_;
  std::optional<Pacer> pacer_;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket&& socket, std::string static_dir)
      : stream_(std::move(socket)), static_dir_(std::move(static_dir)) {}

  void run() {
    asio::dispatch(stream_.get_executor(),
                   beast::bind_front_handler(&HttpConnection::read, shared_from_this()));
  }

 private:
  void read() {
    request_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, request_,
                     beast::bind_front_handler(&HttpConnection::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return;
    if (websocket::is_upgrade(request_)) {
      if (request_.target() == "/session") {
        stream_.expires_never();
        std::make_shared<WebSocketSession>(stream_.release_socket())->run(std::move(request_));
        return;
      }
      respond(http::status::not_found, "text/plain", "websocket endpoint is /session\n");
      return;
    }
    if (request_.method() != http::verb::get && request_.method() != http::verb::head) {
      respond(http::status::method_not_allowed, "text/plain", "GET only\n");
      return;
    }
    const std::string target(request_.target());
    if (target == "/presets") {
      respond(http::status::ok, "application/json", presets_body());
      return;
    }
    if (!static_dir_.empty() && target.find("..") == std::string::npos) {
      std::filesystem::path path = std::filesystem::path(static_dir_) /
                                   (target == "/" ? std::string("index.html") : target.substr(1));
      std::ifstream in(path, std::ios::binary);
      if (in) {
        std::ostringstream body;
        body << in.rdbuf();
        respond(http::status::ok, mime_type(path), body.str());
        return;
      }
    }
    respond(http::status::not_found, "text/plain", "not found\n");
  }

  void respond(http::status status, const std::string& type, std::string body) {
    auto res = std::make_shared<http::response<http::string_body>>(status, request_.version());
    res->set(http::field::server, "whmc");
    res->set(http::field::content_type, type);
    res->keep_alive(request_.keep_alive());
    res->body() = std::move(body);
    res->prepare_payload();
    http::async_write(stream_, *res,
                      [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
                        if (ec) return;
                        if (!res->keep_alive()) {
                          beast::error_code ignored;
                          self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                          return;
                        }
                        self->read();
                      });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  std::string static_dir_;
};

}  // namespace

struct Server::Impl {
  explicit Impl(ServerConfig c) : config(std::move(c)), acceptor(ioc) {}

  void accept() {
    acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec == asio::error::operation_aborted) return;
      } else {
        std::make_shared<HttpConnection>(std::move(socket), config.static_dir)->run();
      }
      accept();
    });
  }

  ServerConfig config;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  std::vector<std::thread> threads;
  std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
};

Server::Server(ServerConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Server::~Server() { stop(); }

void Server::start() {
  const tcp::endpoint endpoint(asio::ip::make_address(impl_->config.bind_address),
                               impl_->config.port);
  impl_->acceptor.open(endpoint.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(endpoint);
  impl_->acceptor.listen(asio::socket_base::max_listen_connections);
  impl_->accept();
  impl_->work.emplace(impl_->ioc.get_executor());
  const int n = impl_->config.threads > 0
                    ? impl_->config.threads
                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  for (int i = 0; i < n; ++i) impl_->threads.emplace_back([this] { impl_->ioc.run(); });
}

void Server::stop() {
  if (!impl_) return;
  impl_->work.reset();
  impl_->ioc.stop();
  for (auto& t : impl_->threads) {
    if (t.joinable() && t.get_id() != std::this_thread::get_id()) t.join();
  }
  impl_->threads.clear();
}

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::wait() {
  for (auto& t : impl_->threads) {
    if (t.joinable()) t.join();
  }
}

}  // namespace whmc::session

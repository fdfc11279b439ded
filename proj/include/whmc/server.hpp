#pragma once

#include <cstdint>
#include <memory>
#include <string>

namespace whmc::session {

struct ServerConfig {
  std::string bind_address = "0.0.0.0";
  std::uint16_t port = 8080;  // 0 picks a free port
  std::string static_dir;     // served under / when non-empty
  int threads = 0;            // 0 = hardware concurrency
};

/// Reads WHMC_BIND and WHMC_PORT (and WHMC_STATIC_DIR) over the defaults.
ServerConfig config_from_environment(ServerConfig defaults = {});

/// WebSocket endpoint /session (one Session per connection) and HTTP GET
/// /presets, plus static files. Each connection is driven on its own strand,
/// so a session's messages and ticks never run concurrently.
class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts accepting on background threads.
  void start();
  void stop();
  std::uint16_t port() const;
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace whmc::session

// Live session service: WebSocket /session, HTTP /presets.

#include <CLI11.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/signal_set.hpp>
#include <csignal>
#include <iostream>

#include "whmc/server.hpp"

int main(int argc, char** argv) {
  auto config = whmc::session::config_from_environment();
  CLI::App app{"WHMC live session server"};
  app.add_option("--bind", config.bind_address, "Bind address (env WHMC_BIND)");
  app.add_option("--port", config.port, "TCP port (env WHMC_PORT)");
  app.add_option("--static", config.static_dir, "Directory of operator console assets (env WHMC_STATIC_DIR)");
  app.add_option("--threads", config.threads, "I/O threads, 0 = hardware concurrency");
  CLI11_PARSE(app, argc, argv);

  whmc::session::Server server(config);
  try {
    server.start();
  } catch (const std::exception& e) {
    std::cerr << "failed to start: " << e.what() << '\n';
    return 1;
  }
  // Signals are handled here, on the main thread, not inside a raw handler.
  boost::asio::io_context signals_ioc;
  boost::asio::signal_set signals(signals_ioc, SIGINT, SIGTERM);
  signals.async_wait([&](const boost::system::error_code&, int) { server.stop(); });
  std::cout << "listening on " << config.bind_address << ":" << server.port() << std::endl;
  signals_ioc.run();
  return 0;
}

#pragma once

#include <atomic>
#include <cstdint>
#include <string>

#include "satvec/wire.hpp"

namespace satvec {

/// Runs one TASK to completion. Never throws: decode or pipeline failures
/// become an error result carrying the entry index.
ResultMessage execute_task(std::span<const std::uint8_t> task_payload);

/// TCP worker. Serves one coordinator connection at a time and handles its
/// tasks sequentially in arrival order.
class WorkerServer {
public:
  /// Binds and listens immediately; port 0 picks an ephemeral port.
  /// Throws Error(io).
  explicit WorkerServer(const Endpoint& listen);

  std::uint16_t port() const noexcept { return port_; }

  /// Blocks until stop() is called.
  void serve();
  void stop() noexcept { stopping_.store(true); }

  /// Drops the listening socket without stopping; used after fork() by the
  /// process that does not serve.
  void release() noexcept { listener_.close(); }

private:
  void handle_connection(Socket conn);

  Socket listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
};

}  // namespace satvec

#include "satvec/worker.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <string>

#include "satvec/codec.hpp"
#include "satvec/error.hpp"
#include "satvec/pipeline.hpp"

namespace satvec {

ResultMessage execute_task(std::span<const std::uint8_t> task_payload) {
  ResultMessage result;
  result.entry_index = peek_entry_index(task_payload).value_or(0);
  const auto start = std::chrono::steady_clock::now();
  try {
    const TaskMessage task = decode_task(task_payload);
    const auto format = format_from_code(task.format_code);
    if (!format) throw Error(Errc::unsupported_format, "format code " + std::to_string(task.format_code));
    const RgbImage img = decode_image(task.image, format);
    result.body = to_geojson(vectorize_image(img, task.cfg));
    result.status = ResultStatus::ok;
  } catch (const std::exception& e) {
    result.status = ResultStatus::error;
    result.body = e.what();
  }
  result.pipeline_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

WorkerServer::WorkerServer(const Endpoint& listen) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* results = nullptr;
  const char* host = listen.host.empty() || listen.host == "*" ? nullptr : listen.host.c_str();
  const int rc = ::getaddrinfo(host, std::to_string(listen.port).c_str(), &hints, &results);
  if (rc != 0) throw Error(Errc::io, listen.to_string() + ": " + ::gai_strerror(rc));

  std::string last_error = "no usable address";
  for (addrinfo* ai = results; ai != nullptr; ai = ai->ai_next) {
    Socket s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
    if (!s.valid()) continue;
    const int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(s.fd(), ai->ai_addr, ai->ai_addrlen) != 0 || ::listen(s.fd(), 8) != 0) {
      last_error = std::strerror(errno);
      continue;
    }
    sockaddr_storage bound{};
    socklen_t len = sizeof bound;
    ::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = bound.ss_family == AF_INET6 ? ntohs(reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port)
                                        : ntohs(reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
    listener_ = std::move(s);
    break;
  }
  ::freeaddrinfo(results);
  if (!listener_.valid()) throw Error(Errc::io, listen.to_string() + ": " + last_error);
}

namespace {

// True when fd is readable; false on timeout.
bool wait_readable(int fd, int timeout_ms) {
  pollfd p{fd, POLLIN, 0};
  const int rc = ::poll(&p, 1, timeout_ms);
  return rc > 0;
}

}  // namespace

void WorkerServer::serve() {
  while (!stopping_.load()) {
    if (!wait_readable(listener_.fd(), 100)) continue;
    Socket conn(::accept(listener_.fd(), nullptr, nullptr));
    if (!conn.valid()) continue;
    const int one = 1;
    ::setsockopt(conn.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    handle_connection(std::move(conn));
  }
}

void WorkerServer::handle_connection(Socket conn) {
  try {
    while (!stopping_.load()) {
      if (!wait_readable(conn.fd(), 100)) continue;
      auto frame = read_frame(conn);
      if (!frame || frame->type == MsgType::shutdown) return;
      if (frame->type == MsgType::task) {
        write_frame(conn, encode_result(execute_task(frame->payload)));
        continue;
      }
      ResultMessage err;
      err.entry_index = peek_entry_index(frame->payload).value_or(0);
      err.status = ResultStatus::error;
      err.body = "unexpected message type " + std::to_string(static_cast<int>(frame->type));
      write_frame(conn, encode_result(err));
    }
  } catch (const Error&) {
    // Broken or desynchronised stream: drop the connection, keep listening.
  }
}

}  // namespace satvec

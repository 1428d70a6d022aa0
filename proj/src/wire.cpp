#include "satvec/wire.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <string>
#include <thread>

#include "bytes.hpp"
#include "satvec/error.hpp"

namespace satvec {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::protocol, what); }

}  // namespace

std::vector<std::uint8_t> encode_frame(const Frame& f) {
  std::vector<std::uint8_t> out;
  out.reserve(5 + f.payload.size());
  detail::ByteWriter w(out);
  w.u32(static_cast<std::uint32_t>(1 + f.payload.size()));
  w.u8(static_cast<std::uint8_t>(f.type));
  w.bytes(f.payload);
  return out;
}

std::vector<std::uint8_t> encode_task(const TaskMessage& t) {
  const std::string cfg = config_to_json(t.cfg);
  Frame f{MsgType::task, {}};
  f.payload.reserve(4 + 2 + 4 + cfg.size() + 8 + t.image.size());
  detail::ByteWriter w(f.payload);
  w.u32(t.entry_index);
  w.u16(t.format_code);
  w.u32(static_cast<std::uint32_t>(cfg.size()));
  w.bytes(cfg);
  w.u64(t.image.size());
  w.bytes(t.image);
  return encode_frame(f);
}

std::vector<std::uint8_t> encode_result(const ResultMessage& r) {
  Frame f{MsgType::result, {}};
  detail::ByteWriter w(f.payload);
  w.u32(r.entry_index);
  w.u8(static_cast<std::uint8_t>(r.status));
  w.f64(r.pipeline_seconds);
  w.u64(r.body.size());
  w.bytes(r.body);
  return encode_frame(f);
}

std::vector<std::uint8_t> encode_shutdown() { return encode_frame(Frame{MsgType::shutdown, {}}); }

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  const auto len = r.u32();
  if (!len || *len == 0 || *len > max_frame_length) malformed("bad frame length");
  if (r.remaining() != *len) malformed("frame length disagrees with buffer");
  const auto type = *r.u8();
  if (type < 1 || type > 3) malformed("unknown message type " + std::to_string(type));
  const auto payload = *r.bytes(*len - 1);
  return Frame{static_cast<MsgType>(type), std::vector<std::uint8_t>(payload.begin(), payload.end())};
}

std::optional<std::uint32_t> peek_entry_index(std::span<const std::uint8_t> payload) {
  detail::ByteReader r(payload);
  return r.u32();
}

TaskMessage decode_task(std::span<const std::uint8_t> payload) {
  detail::ByteReader r(payload);
  TaskMessage t;
  const auto entry = r.u32();
  const auto code = r.u16();
  const auto cfg_len = r.u32();
  if (!entry || !code || !cfg_len) malformed("short TASK header");
  const auto cfg = r.bytes(*cfg_len);
  if (!cfg) malformed("TASK config truncated");
  const auto image_len = r.u64();
  if (!image_len) malformed("TASK image length missing");
  const auto image = r.bytes(*image_len);
  if (!image) malformed("TASK image truncated");
  if (r.remaining() != 0) malformed("trailing bytes in TASK");

  t.entry_index = *entry;
  t.format_code = *code;
  try {
    t.cfg = config_from_json(std::string_view(reinterpret_cast<const char*>(cfg->data()), cfg->size()));
  } catch (const Error& e) {
    malformed(e.what());
  }
  t.image.assign(image->begin(), image->end());
  return t;
}

ResultMessage decode_result(std::span<const std::uint8_t> payload) {
  detail::ByteReader r(payload);
  ResultMessage m;
  const auto entry = r.u32();
  const auto status = r.u8();
  const auto seconds = r.f64();
  const auto body_len = r.u64();
  if (!entry || !status || !seconds || !body_len) malformed("short RESULT header");
  if (*status > 1) malformed("unknown RESULT status " + std::to_string(*status));
  const auto body = r.bytes(*body_len);
  if (!body) malformed("RESULT body truncated");
  if (r.remaining() != 0) malformed("trailing bytes in RESULT");
  m.entry_index = *entry;
  m.status = static_cast<ResultStatus>(*status);
  m.pipeline_seconds = *seconds;
  m.body.assign(body->begin(), body->end());
  return m;
}

// ---------------------------------------------------------------------------

std::string Endpoint::to_string() const {
  const bool v6 = host.find(':') != std::string::npos;
  return (v6 ? "[" + host + "]" : host) + ":" + std::to_string(port);
}

Endpoint parse_endpoint(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
    throw Error(Errc::schema_violation, "endpoint must be host:port, got '" + std::string(text) + "'");
  }
  const auto port_text = text.substr(colon + 1);
  unsigned port = 0;
  const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc() || ptr != port_text.data() + port_text.size() || port > 65535) {
    throw Error(Errc::schema_violation, "bad port in endpoint '" + std::string(text) + "'");
  }
  auto host = text.substr(0, colon);
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  return Endpoint{std::string(host), static_cast<std::uint16_t>(port)};
}

Socket::Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

Socket::~Socket() { close(); }

void Socket::close() noexcept {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void Socket::shutdown() noexcept {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Socket::send_all(std::span<const std::uint8_t> bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::io, std::string("send: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

bool Socket::recv_exact(std::span<std::uint8_t> out) {
  std::size_t got = 0;
  while (got < out.size()) {
    const ssize_t n = ::recv(fd_, out.data() + got, out.size() - got, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::io, std::string("recv: ") + std::strerror(errno));
    }
    if (n == 0) {
      if (got == 0) return false;
      throw Error(Errc::io, "connection closed mid-frame");
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

Socket connect_to(const Endpoint& ep, std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::string last_error = "no attempt made";
  for (;;) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* results = nullptr;
    const int rc = ::getaddrinfo(ep.host.c_str(), std::to_string(ep.port).c_str(), &hints, &results);
    if (rc != 0) {
      last_error = ::gai_strerror(rc);
    } else {
      for (addrinfo* ai = results; ai != nullptr; ai = ai->ai_next) {
        Socket s(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
        if (!s.valid()) continue;
        if (::connect(s.fd(), ai->ai_addr, ai->ai_addrlen) == 0) {
          ::freeaddrinfo(results);
          const int one = 1;
          ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
          return s;
        }
        last_error = std::strerror(errno);
      }
      ::freeaddrinfo(results);
    }
    if (std::chrono::steady_clock::now() >= deadline) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  throw Error(Errc::worker_unreachable, ep.to_string() + ": " + last_error);
}

void write_frame(Socket& s, std::span<const std::uint8_t> encoded) { s.send_all(encoded); }

std::optional<Frame> read_frame(Socket& s) {
  std::uint8_t prefix[4];
  if (!s.recv_exact(prefix)) return std::nullopt;
  detail::ByteReader r(prefix);
  const std::uint32_t len = *r.u32();
  if (len == 0 || len > max_frame_length) malformed("bad frame length " + std::to_string(len));
  std::vector<std::uint8_t> body(len);
  if (!s.recv_exact(body)) throw Error(Errc::io, "connection closed mid-frame");
  // Unknown types are passed through so the receiver can answer them.
  const auto type = body[0];
  return Frame{static_cast<MsgType>(type), std::vector<std::uint8_t>(body.begin() + 1, body.end())};
}

}  // namespace satvec

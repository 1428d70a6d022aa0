#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "satvec/pipeline.hpp"

namespace satvec {

// Frame: u32 length | u8 msg_type | payload, little-endian; length counts
// the type byte plus the payload.
enum class MsgType : std::uint8_t { task = 1, result = 2, shutdown = 3 };

inline constexpr std::uint32_t max_frame_length = 1u << 30;

struct Frame {
  MsgType type = MsgType::shutdown;
  std::vector<std::uint8_t> payload;
};

// TASK: u32 entry_index | u16 format_code | u32 cfg_len | cfg JSON
//       | u64 image_len | image bytes
struct TaskMessage {
  std::uint32_t entry_index = 0;
  std::uint16_t format_code = 0;
  PipelineConfig cfg;
  std::vector<std::uint8_t> image;
};

enum class ResultStatus : std::uint8_t { ok = 0, error = 1 };

// RESULT: u32 entry_index | u8 status | f64 pipeline_seconds | u64 body_len
//         | body (GeoJSON or UTF-8 error text)
struct ResultMessage {
  std::uint32_t entry_index = 0;
  ResultStatus status = ResultStatus::ok;
  double pipeline_seconds = 0.0;
  std::string body;

  bool operator==(const ResultMessage&) const = default;
};

std::vector<std::uint8_t> encode_frame(const Frame& f);
std::vector<std::uint8_t> encode_task(const TaskMessage& t);
std::vector<std::uint8_t> encode_result(const ResultMessage& r);
std::vector<std::uint8_t> encode_shutdown();

/// Parses a complete frame (length prefix included). Throws Error(protocol).
Frame decode_frame(std::span<const std::uint8_t> bytes);
/// Payload decoders; throw Error(protocol) on malformed input.
TaskMessage decode_task(std::span<const std::uint8_t> payload);
ResultMessage decode_result(std::span<const std::uint8_t> payload);

/// Leading u32 of a TASK payload, if present.
std::optional<std::uint32_t> peek_entry_index(std::span<const std::uint8_t> payload);

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  std::string to_string() const;
  bool operator==(const Endpoint&) const = default;
};

/// "host:port". Throws Error(schema_violation).
Endpoint parse_endpoint(std::string_view text);

/// Owning TCP socket descriptor.
class Socket {
public:
  Socket() = default;
  explicit Socket(int fd) noexcept : fd_(fd) {}
  Socket(Socket&& other) noexcept;
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket();

  int fd() const noexcept { return fd_; }
  bool valid() const noexcept { return fd_ >= 0; }
  void close() noexcept;
  /// Half-closes both directions without releasing the descriptor.
  void shutdown() noexcept;

  /// Throws Error(io) on failure.
  void send_all(std::span<const std::uint8_t> bytes);
  /// False on orderly EOF before any byte; throws Error(io) on a short read.
  bool recv_exact(std::span<std::uint8_t> out);

private:
  int fd_ = -1;
};

/// Tries to connect until `timeout` elapses. Throws
/// Error(worker_unreachable) naming the endpoint.
Socket connect_to(const Endpoint& ep, std::chrono::milliseconds timeout);

void write_frame(Socket& s, std::span<const std::uint8_t> encoded);
/// nullopt on clean EOF at a frame boundary. Throws Error(io) on a broken
/// stream and Error(protocol) on an impossible length. The type byte is not
/// validated.
std::optional<Frame> read_frame(Socket& s);

}  // namespace satvec

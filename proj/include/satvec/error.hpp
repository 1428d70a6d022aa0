#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace satvec {

enum class Errc {
  unsupported_format,
  corrupt_stream,
  zero_dimension,
  schema_violation,
  bad_magic,
  truncated_file,
  index_out_of_range,
  mismatched_source,
  bundle_unreadable,
  worker_unreachable,
  protocol,
  io,
};

std::string_view errc_name(Errc code);

/// Single exception type for the library; `code()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

}  // namespace satvec

#pragma once

// Little-endian packing helpers shared by the bundle and wire formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace satvec::detail {

class ByteWriter {
public:
  explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  void bytes(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }

  /// Overwrites a u32 previously written at `at`.
  void patch_u32(std::size_t at, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
  }

private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t>& out_;
};

/// Bounds-checked cursor; every read returns nullopt instead of overrunning.
class ByteReader {
public:
  explicit ByteReader(std::span<const std::uint8_t> in, std::size_t pos = 0) : in_(in), pos_(pos) {}

  std::size_t pos() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return pos_ <= in_.size() ? in_.size() - pos_ : 0; }

  std::optional<std::uint8_t> u8() { return get<std::uint8_t>(1); }
  std::optional<std::uint16_t> u16() { return get<std::uint16_t>(2); }
  std::optional<std::uint32_t> u32() { return get<std::uint32_t>(4); }
  std::optional<std::uint64_t> u64() { return get<std::uint64_t>(8); }
  std::optional<double> f64() {
    auto v = u64();
    if (!v) return std::nullopt;
    return std::bit_cast<double>(*v);
  }
  std::optional<std::span<const std::uint8_t>> bytes(std::uint64_t n) {
    if (n > remaining()) return std::nullopt;
    auto s = in_.subspan(pos_, static_cast<std::size_t>(n));
    pos_ += static_cast<std::size_t>(n);
    return s;
  }

private:
  template <typename T>
  std::optional<T> get(int n) {
    if (remaining() < static_cast<std::size_t>(n)) return std::nullopt;
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += n;
    return static_cast<T>(v);
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_;
};

}  // namespace satvec::detail

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "satvec/codec.hpp"

namespace satvec {

// Layout, all integers little-endian:
//   "SVB1" | u32 entry_count | entry_count x (u64 offset, u64 record_length)
//   record: u16 format_code | u32 width | u32 height | u16 name_len | name
//           | u64 payload_len | payload
// The file ends exactly at the end of the last record.
inline constexpr std::size_t bundle_header_size = 8;
inline constexpr std::size_t bundle_index_entry_size = 16;

struct BundleEntryHeader {
  ImageFormat format = ImageFormat::png;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::string name;
  std::uint64_t payload_len = 0;

  std::uint64_t pixel_count() const noexcept { return std::uint64_t{width} * height; }
  bool operator==(const BundleEntryHeader&) const = default;
};

struct BundleInput {
  std::string name;
  std::vector<std::uint8_t> bytes;
};

/// Packs the inputs in order. Every payload is decoded once to record its
/// dimensions; failures throw Error naming the offending input.
std::vector<std::uint8_t> bundle_create(std::span<const BundleInput> inputs);

/// Validated, read-only view over a bundle held in memory.
class ImageBundle {
public:
  /// Throws Error with bad_magic or truncated_file.
  static ImageBundle open(std::vector<std::uint8_t> bytes);
  /// Throws Error(bundle_unreadable) if the file cannot be read, otherwise
  /// as open().
  static ImageBundle open_file(const std::filesystem::path& path);

  std::size_t entry_count() const noexcept { return headers_.size(); }
  const BundleEntryHeader& header(std::size_t i) const;
  std::span<const BundleEntryHeader> headers() const noexcept { return headers_; }

  /// Random access through the index. Throws Error(index_out_of_range).
  std::pair<BundleEntryHeader, std::vector<std::uint8_t>> read_entry(std::size_t i) const;
  std::span<const std::uint8_t> payload(std::size_t i) const;

  /// Walks the records back to back from the end of the index, ignoring it.
  std::vector<std::pair<BundleEntryHeader, std::vector<std::uint8_t>>> read_sequential() const;

private:
  struct Slot {
    std::uint64_t offset;
    std::uint64_t length;
    std::uint64_t payload_offset;
  };

  std::vector<std::uint8_t> bytes_;
  std::vector<Slot> slots_;
  std::vector<BundleEntryHeader> headers_;
};

/// Header-only entry filter. Absent fields accept everything.
struct CullPredicate {
  std::optional<std::uint32_t> min_width;
  std::optional<std::uint32_t> min_height;
  std::optional<std::uint64_t> min_pixel_count;
  std::optional<std::uint64_t> max_pixel_count;
  std::optional<std::set<ImageFormat>> allowed_formats;

  bool accepts(const BundleEntryHeader& h) const;
};

/// Predicate accepting exactly the entries both inputs accept.
CullPredicate conjoin(const CullPredicate& a, const CullPredicate& b);

/// Ascending indices of accepted entries.
std::vector<std::uint32_t> cull(const ImageBundle& b, const CullPredicate& p);

}  // namespace satvec

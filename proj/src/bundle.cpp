#include "satvec/bundle.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <string>

#include "bytes.hpp"
#include "satvec/error.hpp"

namespace satvec {

namespace {

constexpr char bundle_magic[4] = {'S', 'V', 'B', '1'};
// format_code + width + height + name_len + payload_len
constexpr std::size_t record_fixed_size = 2 + 4 + 4 + 2 + 8;

}  // namespace

std::vector<std::uint8_t> bundle_create(std::span<const BundleInput> inputs) {
  std::vector<BundleEntryHeader> headers;
  headers.reserve(inputs.size());
  for (const auto& in : inputs) {
    if (in.name.size() > 0xFFFF) {
      throw Error(Errc::schema_violation, in.name.substr(0, 64) + "...: name longer than 65535 bytes");
    }
    const auto format = detect_format(in.bytes);
    if (!format) throw Error(Errc::unsupported_format, in.name + ": unrecognized magic bytes");
    RgbImage decoded;
    try {
      decoded = decode_image(in.bytes, format);
    } catch (const Error& e) {
      throw Error(e.code(), in.name + ": " + e.what());
    }
    headers.push_back({*format, decoded.width(), decoded.height(), in.name, in.bytes.size()});
  }

  std::vector<std::uint8_t> out;
  detail::ByteWriter w(out);
  w.bytes(std::string_view(bundle_magic, 4));
  w.u32(static_cast<std::uint32_t>(inputs.size()));

  std::uint64_t offset = bundle_header_size + bundle_index_entry_size * inputs.size();
  for (const auto& h : headers) {
    const std::uint64_t length = record_fixed_size + h.name.size() + h.payload_len;
    w.u64(offset);
    w.u64(length);
    offset += length;
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& h = headers[i];
    w.u16(static_cast<std::uint16_t>(h.format));
    w.u32(h.width);
    w.u32(h.height);
    w.u16(static_cast<std::uint16_t>(h.name.size()));
    w.bytes(h.name);
    w.u64(h.payload_len);
    w.bytes(inputs[i].bytes);
  }
  return out;
}

namespace {

[[noreturn]] void truncated(const std::string& what) { throw Error(Errc::truncated_file, what); }

// Parses the record at `offset`; returns its header and payload offset.
std::pair<BundleEntryHeader, std::uint64_t> parse_record(std::span<const std::uint8_t> bytes, std::uint64_t offset,
                                                         std::uint64_t length, std::size_t entry) {
  const std::string where = "entry " + std::to_string(entry);
  if (offset > bytes.size() || length > bytes.size() - offset) truncated(where + ": record outside file");
  detail::ByteReader r(bytes.first(static_cast<std::size_t>(offset + length)), static_cast<std::size_t>(offset));

  BundleEntryHeader h;
  const auto code = r.u16();
  const auto width = r.u32();
  const auto height = r.u32();
  const auto name_len = r.u16();
  if (!code || !width || !height || !name_len) truncated(where + ": short record header");
  const auto format = format_from_code(*code);
  if (!format) throw Error(Errc::truncated_file, where + ": invalid format code " + std::to_string(*code));
  const auto name = r.bytes(*name_len);
  const auto payload_len = r.u64();
  if (!name || !payload_len) truncated(where + ": short record header");
  if (*payload_len != r.remaining()) truncated(where + ": payload length disagrees with index");

  h.format = *format;
  h.width = *width;
  h.height = *height;
  h.name.assign(name->begin(), name->end());
  h.payload_len = *payload_len;
  return {std::move(h), r.pos()};
}

}  // namespace

ImageBundle ImageBundle::open(std::vector<std::uint8_t> bytes) {
  ImageBundle b;
  b.bytes_ = std::move(bytes);
  const std::span<const std::uint8_t> all = b.bytes_;
  if (all.size() < 4 || !std::equal(all.begin(), all.begin() + 4, bundle_magic)) {
    throw Error(Errc::bad_magic, "not a bundle file");
  }
  detail::ByteReader r(all, 4);
  const auto count = r.u32();
  if (!count) truncated("missing entry count");

  const std::uint64_t index_end = bundle_header_size + std::uint64_t{bundle_index_entry_size} * *count;
  if (index_end > all.size()) truncated("index extends past end of file");

  std::uint64_t prev_end = index_end;
  for (std::uint32_t i = 0; i < *count; ++i) {
    const std::uint64_t offset = *r.u64();
    const std::uint64_t length = *r.u64();
    if (offset < prev_end) truncated("entry " + std::to_string(i) + ": offsets overlap or are out of order");
    auto [header, payload_offset] = parse_record(all, offset, length, i);
    b.slots_.push_back({offset, length, payload_offset});
    b.headers_.push_back(std::move(header));
    prev_end = offset + length;
  }
  if (prev_end != all.size()) {
    throw Error(Errc::truncated_file, std::to_string(all.size() - prev_end) + " trailing bytes after last record");
  }
  return b;
}

ImageBundle ImageBundle::open_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::bundle_unreadable, path.string() + ": cannot open");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::bundle_unreadable, path.string() + ": read failed");
  return open(std::move(bytes));
}

const BundleEntryHeader& ImageBundle::header(std::size_t i) const {
  if (i >= headers_.size()) {
    throw Error(Errc::index_out_of_range,
                "entry " + std::to_string(i) + " of " + std::to_string(headers_.size()));
  }
  return headers_[i];
}

std::span<const std::uint8_t> ImageBundle::payload(std::size_t i) const {
  const auto& h = header(i);
  return std::span<const std::uint8_t>(bytes_).subspan(static_cast<std::size_t>(slots_[i].payload_offset),
                                                       static_cast<std::size_t>(h.payload_len));
}

std::pair<BundleEntryHeader, std::vector<std::uint8_t>> ImageBundle::read_entry(std::size_t i) const {
  const auto p = payload(i);
  return {headers_[i], std::vector<std::uint8_t>(p.begin(), p.end())};
}

std::vector<std::pair<BundleEntryHeader, std::vector<std::uint8_t>>> ImageBundle::read_sequential() const {
  std::vector<std::pair<BundleEntryHeader, std::vector<std::uint8_t>>> out;
  const std::span<const std::uint8_t> all = bytes_;
  std::uint64_t offset = bundle_header_size + std::uint64_t{bundle_index_entry_size} * headers_.size();
  while (offset < all.size()) {
    detail::ByteReader r(all, static_cast<std::size_t>(offset));
    r.u16();
    r.u32();
    r.u32();
    const auto name_len = r.u16();
    if (!name_len || !r.bytes(*name_len)) truncated("sequential read: short record");
    const auto payload_len = r.u64();
    if (!payload_len || *payload_len > r.remaining()) truncated("sequential read: short record");
    const std::uint64_t length = r.pos() + *payload_len - offset;
    auto [header, payload_offset] = parse_record(all, offset, length, out.size());
    const auto payload = all.subspan(static_cast<std::size_t>(payload_offset), static_cast<std::size_t>(header.payload_len));
    out.emplace_back(std::move(header), std::vector<std::uint8_t>(payload.begin(), payload.end()));
    offset += length;
  }
  return out;
}

// ---------------------------------------------------------------------------

bool CullPredicate::accepts(const BundleEntryHeader& h) const {
  if (min_width && h.width < *min_width) return false;
  if (min_height && h.height < *min_height) return false;
  if (min_pixel_count && h.pixel_count() < *min_pixel_count) return false;
  if (max_pixel_count && h.pixel_count() > *max_pixel_count) return false;
  if (allowed_formats && !allowed_formats->contains(h.format)) return false;
  return true;
}

namespace {

template <typename T, typename Pick>
std::optional<T> combine(const std::optional<T>& a, const std::optional<T>& b, Pick pick) {
  if (a && b) return pick(*a, *b);
  return a ? a : b;
}

}  // namespace

CullPredicate conjoin(const CullPredicate& a, const CullPredicate& b) {
  auto larger = [](auto x, auto y) { return std::max(x, y); };
  auto smaller = [](auto x, auto y) { return std::min(x, y); };
  CullPredicate out;
  out.min_width = combine(a.min_width, b.min_width, larger);
  out.min_height = combine(a.min_height, b.min_height, larger);
  out.min_pixel_count = combine(a.min_pixel_count, b.min_pixel_count, larger);
  out.max_pixel_count = combine(a.max_pixel_count, b.max_pixel_count, smaller);
  out.allowed_formats = combine(a.allowed_formats, b.allowed_formats, [](const auto& x, const auto& y) {
    std::set<ImageFormat> both;
    std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::inserter(both, both.end()));
    return both;
  });
  return out;
}

std::vector<std::uint32_t> cull(const ImageBundle& b, const CullPredicate& p) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < b.entry_count(); ++i) {
    if (p.accepts(b.header(i))) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

}  // namespace satvec

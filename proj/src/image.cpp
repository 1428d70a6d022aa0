#include "satvec/image.hpp"

#include <string>

#include "satvec/error.hpp"

namespace satvec {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::unsupported_format: return "UnsupportedFormat";
    case Errc::corrupt_stream: return "CorruptStream";
    case Errc::zero_dimension: return "ZeroDimension";
    case Errc::schema_violation: return "SchemaViolation";
    case Errc::bad_magic: return "BadMagic";
    case Errc::truncated_file: return "TruncatedFile";
    case Errc::index_out_of_range: return "IndexOutOfRange";
    case Errc::mismatched_source: return "MismatchedSource";
    case Errc::bundle_unreadable: return "BundleUnreadable";
    case Errc::worker_unreachable: return "WorkerUnreachable";
    case Errc::protocol: return "ProtocolError";
    case Errc::io: return "IoError";
  }
  return "Error";
}

namespace {

void check_dims(std::uint32_t w, std::uint32_t h) {
  if (w == 0 || h == 0) {
    throw Error(Errc::zero_dimension, std::to_string(w) + "x" + std::to_string(h));
  }
}

}  // namespace

RgbImage::RgbImage(std::uint32_t width, std::uint32_t height)
    : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(pixel_count() * 3, 0);
}

RgbImage::RgbImage(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != pixel_count() * 3) {
    throw Error(Errc::corrupt_stream, "RGB buffer holds " + std::to_string(data_.size()) +
                                          " bytes, expected " + std::to_string(pixel_count() * 3));
  }
}

GrayImage::GrayImage(std::uint32_t width, std::uint32_t height)
    : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(pixel_count(), 0);
}

GrayImage::GrayImage(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != pixel_count()) {
    throw Error(Errc::corrupt_stream, "gray buffer holds " + std::to_string(data_.size()) +
                                          " bytes, expected " + std::to_string(pixel_count()));
  }
}

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  // Max is 255000 + 500, so the quotient never exceeds 255.
  const std::uint32_t scaled = 299u * r + 587u * g + 114u * b + 500u;
  return static_cast<std::uint8_t>(scaled / 1000u);
}

GrayImage to_grayscale(const RgbImage& img) {
  GrayImage out(img.width(), img.height());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = luma(src[3 * i], src[3 * i + 1], src[3 * i + 2]);
  }
  return out;
}

RgbImage gray_to_rgb(const GrayImage& img) {
  RgbImage out(img.width(), img.height());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = src[i];
  }
  return out;
}

}  // namespace satvec

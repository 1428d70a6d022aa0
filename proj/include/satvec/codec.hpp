#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "satvec/image.hpp"

namespace satvec {

/// Numeric values are the on-disk bundle format codes.
enum class ImageFormat : std::uint16_t {
  png = 1,
  jpeg = 2,
  ppm = 3,
  pgm = 4,
};

std::string_view format_name(ImageFormat f);
std::optional<ImageFormat> format_from_name(std::string_view name);
std::optional<ImageFormat> format_from_code(std::uint16_t code);

/// Sniffs magic bytes; nullopt when unrecognized.
std::optional<ImageFormat> detect_format(std::span<const std::uint8_t> bytes);

/// Decodes PNG, JPEG, binary PPM (P6) or PGM (P5). Gray sources are
/// promoted to RGB by channel replication.
///
/// With a `hint`, the stream must match that format. Throws Error with
/// unsupported_format, corrupt_stream or zero_dimension.
RgbImage decode_image(std::span<const std::uint8_t> bytes,
                      std::optional<ImageFormat> hint = std::nullopt);

std::vector<std::uint8_t> encode_png(const RgbImage& img);
std::vector<std::uint8_t> encode_png(const GrayImage& img);

// Lossy; used for fixtures and synthetic inputs, never on the output path.
std::vector<std::uint8_t> encode_jpeg(const RgbImage& img, int quality = 90);

std::vector<std::uint8_t> encode_ppm(const RgbImage& img);
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

}  // namespace satvec

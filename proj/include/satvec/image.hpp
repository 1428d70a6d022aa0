#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace satvec {

/// 8-bit interleaved RGB raster, top-left origin, row-major.
class RgbImage {
public:
  RgbImage() = default;
  /// Zero-filled image. Throws Error(zero_dimension) when either side is 0.
  RgbImage(std::uint32_t width, std::uint32_t height);
  /// Takes ownership of `data`; its size must be width*height*3.
  RgbImage(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> data);

  std::uint32_t width() const noexcept { return width_; }
  std::uint32_t height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return std::size_t{width_} * height_; }
  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  bool operator==(const RgbImage&) const = default;

private:
  std::uint32_t width_ = 0;
  std::uint32_t height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// 8-bit single channel raster.
class GrayImage {
public:
  GrayImage() = default;
  GrayImage(std::uint32_t width, std::uint32_t height);
  GrayImage(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> data);

  std::uint32_t width() const noexcept { return width_; }
  std::uint32_t height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return std::size_t{width_} * height_; }
  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  std::uint8_t at(std::uint32_t x, std::uint32_t y) const { return data_[std::size_t{y} * width_ + x]; }
  std::uint8_t& at(std::uint32_t x, std::uint32_t y) { return data_[std::size_t{y} * width_ + x]; }

  bool operator==(const GrayImage&) const = default;

private:
  std::uint32_t width_ = 0;
  std::uint32_t height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// BT.601 luma with round-half-up: (299 R + 587 G + 114 B + 500) / 1000.
std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

GrayImage to_grayscale(const RgbImage& img);

/// Replicates each sample into R, G and B.
RgbImage gray_to_rgb(const GrayImage& img);

}  // namespace satvec

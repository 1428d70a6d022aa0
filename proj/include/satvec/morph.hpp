#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "satvec/image.hpp"

namespace satvec {

enum class Connectivity : std::uint8_t { four = 4, eight = 8 };

/// Throws Error(schema_violation) for anything other than 4 or 8.
Connectivity connectivity_from_int(int n);

/// Boolean raster; foreground is true. Stored one byte per pixel.
class BinaryImage {
public:
  BinaryImage() = default;
  BinaryImage(std::uint32_t width, std::uint32_t height, bool fill = false);
  BinaryImage(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> mask);

  std::uint32_t width() const noexcept { return width_; }
  std::uint32_t height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return std::size_t{width_} * height_; }
  std::span<const std::uint8_t> data() const noexcept { return mask_; }

  bool get(std::uint32_t x, std::uint32_t y) const { return mask_[index(x, y)] != 0; }
  void set(std::uint32_t x, std::uint32_t y, bool v) { mask_[index(x, y)] = v ? 1 : 0; }

  /// Out-of-bounds coordinates read as background.
  bool get_or_background(std::int64_t x, std::int64_t y) const noexcept {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return false;
    return mask_[static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x)] != 0;
  }

  std::size_t count() const noexcept;
  bool is_subset_of(const BinaryImage& other) const;
  BinaryImage complement() const;

  bool operator==(const BinaryImage&) const = default;

private:
  std::size_t index(std::uint32_t x, std::uint32_t y) const { return std::size_t{y} * width_ + x; }

  std::uint32_t width_ = 0;
  std::uint32_t height_ = 0;
  std::vector<std::uint8_t> mask_;
};

/// Odd-sized square neighbourhood mask with its origin at the center cell.
class StructuringElement {
public:
  /// size x size, all cells set.
  static StructuringElement square(std::uint32_t size);
  /// Plus-shaped: center row and center column set.
  static StructuringElement cross(std::uint32_t size);
  /// Throws Error(schema_violation) if size is even or the mask is empty.
  StructuringElement(std::uint32_t size, std::vector<std::uint8_t> mask);

  std::uint32_t size() const noexcept { return size_; }
  std::int32_t radius() const noexcept { return static_cast<std::int32_t>(size_ / 2); }
  bool at(std::uint32_t col, std::uint32_t row) const { return mask_[std::size_t{row} * size_ + col] != 0; }

private:
  std::uint32_t size_;
  std::vector<std::uint8_t> mask_;
};

struct ThresholdLevel {
  std::uint8_t level = 0;
  bool operator==(const ThresholdLevel&) const = default;
};

/// Dense component labels: 0 is background, 1..K are components in
/// first-encounter row-major order.
struct LabelMap {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint32_t> labels;
  /// component_sizes[k - 1] is the pixel count of label k.
  std::vector<std::size_t> component_sizes;

  std::size_t component_count() const noexcept { return component_sizes.size(); }
  std::uint32_t at(std::uint32_t x, std::uint32_t y) const { return labels[std::size_t{y} * width + x]; }
};

/// Otsu's threshold over a 256-bin histogram. Foreground is {v > t}.
/// Ties resolve to the smallest t; a constant image returns its value.
ThresholdLevel otsu_threshold(const GrayImage& img);

BinaryImage binarize(const GrayImage& img, ThresholdLevel t);

LabelMap label_components(const BinaryImage& bw, Connectivity conn);

/// Keeps components with at least `min_area` pixels.
BinaryImage area_open(const BinaryImage& bw, std::size_t min_area, Connectivity conn);

// Out-of-bounds pixels are background for both operators.
BinaryImage dilate(const BinaryImage& bw, const StructuringElement& se);
BinaryImage erode(const BinaryImage& bw, const StructuringElement& se);

BinaryImage morph_close(const BinaryImage& bw, const StructuringElement& se);
BinaryImage morph_open(const BinaryImage& bw, const StructuringElement& se);

/// Background not 4-connected to the image border becomes foreground.
BinaryImage fill_holes(const BinaryImage& bw);

}  // namespace satvec

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "satvec/image.hpp"
#include "satvec/morph.hpp"
#include "satvec/vector.hpp"

namespace satvec {

struct PipelineConfig {
  std::size_t min_area_pre = 300;
  std::size_t min_area_post = 10000;
  std::uint32_t se_size = 3;
  Connectivity connectivity = Connectivity::eight;

  bool operator==(const PipelineConfig&) const = default;
};

/// Side length of the imagery the default area thresholds were tuned for.
inline constexpr std::uint64_t reference_side_px = 7000;

/// Scales both area thresholds by (width*height) / 7000^2, rounding up and
/// never below 1.
PipelineConfig scaled_for_image(const PipelineConfig& cfg, std::uint32_t width, std::uint32_t height);

/// Throws Error(schema_violation) on an even or zero se_size.
void validate(const PipelineConfig& cfg);

/// Canonical JSON (sorted keys, no whitespace) used on the wire.
std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(std::string_view text);

/// Every intermediate mask of one pipeline run, in execution order.
struct PipelineTrace {
  GrayImage gray;
  ThresholdLevel threshold;
  BinaryImage binary;
  BinaryImage pre_opened;
  BinaryImage closed;
  BinaryImage opened;
  BinaryImage filled;
  BinaryImage post_opened;
  VectorScene scene;
};

/// grayscale -> otsu -> binarize -> area_open(pre) -> close -> open ->
/// fill_holes -> area_open(post) -> trace.
VectorScene vectorize_image(const RgbImage& img, const PipelineConfig& cfg, std::string source_name = {});

PipelineTrace vectorize_image_traced(const RgbImage& img, const PipelineConfig& cfg, std::string source_name = {});

}  // namespace satvec

#include "satvec/pipeline.hpp"

#include <string>

#include <json.hpp>

#include "satvec/error.hpp"

namespace satvec {

PipelineConfig scaled_for_image(const PipelineConfig& cfg, std::uint32_t width, std::uint32_t height) {
  constexpr std::uint64_t reference_area = reference_side_px * reference_side_px;
  const std::uint64_t area = std::uint64_t{width} * height;
  auto scale = [&](std::size_t threshold) -> std::size_t {
    // ceil(threshold * area / reference_area); 128-bit keeps large inputs exact.
    const unsigned __int128 num = static_cast<unsigned __int128>(threshold) * area;
    const auto scaled = static_cast<std::size_t>((num + reference_area - 1) / reference_area);
    return scaled < 1 ? 1 : scaled;
  };
  PipelineConfig out = cfg;
  out.min_area_pre = scale(cfg.min_area_pre);
  out.min_area_post = scale(cfg.min_area_post);
  return out;
}

void validate(const PipelineConfig& cfg) {
  if (cfg.se_size == 0 || cfg.se_size % 2 == 0) {
    throw Error(Errc::schema_violation, "se_size must be odd, got " + std::to_string(cfg.se_size));
  }
  if (cfg.connectivity != Connectivity::four && cfg.connectivity != Connectivity::eight) {
    throw Error(Errc::schema_violation, "connectivity must be 4 or 8");
  }
}

std::string config_to_json(const PipelineConfig& cfg) {
  // nlohmann::json keeps object keys sorted, which makes this canonical.
  nlohmann::json j = {
      {"connectivity", static_cast<int>(cfg.connectivity)},
      {"min_area_post", cfg.min_area_post},
      {"min_area_pre", cfg.min_area_pre},
      {"se_size", cfg.se_size},
  };
  return j.dump();
}

PipelineConfig config_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::schema_violation, std::string("pipeline config: ") + e.what());
  }
  auto field = [&](const char* key) -> std::uint64_t {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_unsigned()) {
      throw Error(Errc::schema_violation, std::string("pipeline config: /") + key + " must be a non-negative integer");
    }
    return it->get<std::uint64_t>();
  };
  if (!j.is_object()) throw Error(Errc::schema_violation, "pipeline config: expected an object");
  PipelineConfig cfg;
  cfg.connectivity = connectivity_from_int(static_cast<int>(field("connectivity")));
  cfg.min_area_post = field("min_area_post");
  cfg.min_area_pre = field("min_area_pre");
  const auto se = field("se_size");
  if (se > 0xFFFF) throw Error(Errc::schema_violation, "pipeline config: /se_size too large");
  cfg.se_size = static_cast<std::uint32_t>(se);
  validate(cfg);
  return cfg;
}

PipelineTrace vectorize_image_traced(const RgbImage& img, const PipelineConfig& cfg, std::string source_name) {
  validate(cfg);
  PipelineTrace t;
  const auto se = StructuringElement::square(cfg.se_size);
  t.gray = to_grayscale(img);
  t.threshold = otsu_threshold(t.gray);
  t.binary = binarize(t.gray, t.threshold);
  t.pre_opened = area_open(t.binary, cfg.min_area_pre, cfg.connectivity);
  t.closed = morph_close(t.pre_opened, se);
  t.opened = morph_open(t.closed, se);
  t.filled = fill_holes(t.opened);
  t.post_opened = area_open(t.filled, cfg.min_area_post, cfg.connectivity);

  t.scene.width = img.width();
  t.scene.height = img.height();
  t.scene.threshold_used = t.threshold;
  t.scene.source_name = std::move(source_name);
  t.scene.polygons = trace_outer_contours(t.post_opened);
  return t;
}

VectorScene vectorize_image(const RgbImage& img, const PipelineConfig& cfg, std::string source_name) {
  validate(cfg);
  const auto se = StructuringElement::square(cfg.se_size);
  const GrayImage gray = to_grayscale(img);
  const ThresholdLevel threshold = otsu_threshold(gray);
  BinaryImage bw = binarize(gray, threshold);
  bw = area_open(bw, cfg.min_area_pre, cfg.connectivity);
  bw = morph_close(bw, se);
  bw = morph_open(bw, se);
  bw = fill_holes(bw);
  bw = area_open(bw, cfg.min_area_post, cfg.connectivity);

  VectorScene scene;
  scene.width = img.width();
  scene.height = img.height();
  scene.threshold_used = threshold;
  scene.source_name = std::move(source_name);
  scene.polygons = trace_outer_contours(bw);
  return scene;
}

}  // namespace satvec

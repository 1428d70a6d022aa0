#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "satvec/morph.hpp"

namespace satvec {

struct Point {
  std::int32_t x = 0;
  std::int32_t y = 0;
  bool operator==(const Point&) const = default;
};

/// Outer boundary of one 8-connected component as a closed chain of pixel
/// coordinates. The closing edge (last -> first) is implicit. Traversal is
/// clockwise with y pointing down.
struct Polygon {
  std::vector<Point> points;
  std::uint32_t component_id = 0;
  std::size_t area_px = 0;

  bool operator==(const Polygon&) const = default;
};

struct VectorScene {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<Polygon> polygons;
  ThresholdLevel threshold_used;
  std::string source_name;

  bool operator==(const VectorScene&) const = default;
};

/// Moore-neighbour border following, one polygon per 8-connected component.
///
/// Each trace starts at the component's first pixel in row-major order with
/// the west neighbour as backtrack, and stops when the first move out of
/// the start pixel is about to repeat. Only outer boundaries are traced.
/// Component ids and area_px come from label_components(bw, eight).
std::vector<Polygon> trace_outer_contours(const BinaryImage& bw);

/// Pixel count of the 8-connected component of `bw` that `p` outlines.
/// Throws Error(mismatched_source) when the points are not all foreground
/// pixels of a single component.
std::size_t polygon_pixel_area(const Polygon& p, const BinaryImage& bw);

/// Fills every polygon, boundary pixels included, into a width x height mask.
BinaryImage rasterize(const VectorScene& scene);

/// Twice the signed shoelace area; positive means clockwise in y-down space.
std::int64_t signed_area2(const Polygon& p);

/// Deterministic GeoJSON FeatureCollection in pixel coordinates.
std::string to_geojson(const VectorScene& scene);

/// Inverse of to_geojson. Throws Error(schema_violation) naming the
/// offending JSON path.
VectorScene from_geojson(std::string_view text);

}  // namespace satvec

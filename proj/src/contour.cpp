#include "satvec/vector.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "satvec/error.hpp"

namespace satvec {

namespace {

// Moore neighbourhood, clockwise on screen (y down), starting west.
constexpr std::array<Point, 8> moore = {{
    {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1},
}};

int direction_of(Point delta) {
  for (int d = 0; d < 8; ++d) {
    if (moore[d] == delta) return d;
  }
  throw std::logic_error("points are not 8-neighbours");
}

struct TraceState {
  Point pixel;
  int backtrack;  // direction from pixel to the background cell we came from
  bool operator==(const TraceState&) const = default;
};

// Next boundary state clockwise from `state`, or nullopt for a lone pixel.
std::optional<TraceState> step_from(const BinaryImage& bw, const TraceState& state) {
  for (int k = 1; k < 8; ++k) {
    const int d = (state.backtrack + k) % 8;
    const Point q{state.pixel.x + moore[d].x, state.pixel.y + moore[d].y};
    if (!bw.get_or_background(q.x, q.y)) continue;
    const Point prev = moore[(d + 7) % 8];
    const Point back{state.pixel.x + prev.x - q.x, state.pixel.y + prev.y - q.y};
    return TraceState{q, direction_of(back)};
  }
  return std::nullopt;
}

std::vector<Point> trace_from(const BinaryImage& bw, Point start, std::size_t area) {
  std::vector<Point> points{start};
  const auto first = step_from(bw, TraceState{start, 0});
  if (!first) return points;

  // The artificial (start, west) state need not recur on thin shapes, so
  // stop instead when the first move out of the start is about to repeat.
  // Each boundary pixel can be left in at most 8 ways, which bounds the walk.
  const std::size_t step_limit = 8 * area + 8;
  TraceState state = *first;
  for (std::size_t step = 0; step < step_limit; ++step) {
    if (state.pixel == start) {
      const auto next = step_from(bw, state);
      if (next && *next == *first) return points;
    }
    points.push_back(state.pixel);
    state = *step_from(bw, state);
  }
  throw std::logic_error("contour trace did not close");
}

}  // namespace

std::vector<Polygon> trace_outer_contours(const BinaryImage& bw) {
  const LabelMap labels = label_components(bw, Connectivity::eight);
  const std::size_t k = labels.component_count();
  std::vector<Polygon> out(k);
  std::vector<bool> started(k, false);

  for (std::uint32_t y = 0; y < bw.height(); ++y) {
    for (std::uint32_t x = 0; x < bw.width(); ++x) {
      const std::uint32_t id = labels.at(x, y);
      if (id == 0 || started[id - 1]) continue;
      started[id - 1] = true;
      Polygon& poly = out[id - 1];
      poly.component_id = id;
      poly.area_px = labels.component_sizes[id - 1];
      poly.points = trace_from(bw, Point{static_cast<std::int32_t>(x), static_cast<std::int32_t>(y)}, poly.area_px);
    }
  }
  return out;
}

std::size_t polygon_pixel_area(const Polygon& p, const BinaryImage& bw) {
  if (p.points.empty()) throw Error(Errc::mismatched_source, "polygon has no points");
  const LabelMap labels = label_components(bw, Connectivity::eight);
  std::uint32_t id = 0;
  for (const auto& pt : p.points) {
    if (!bw.get_or_background(pt.x, pt.y)) {
      throw Error(Errc::mismatched_source,
                  "point (" + std::to_string(pt.x) + "," + std::to_string(pt.y) + ") is not foreground");
    }
    const std::uint32_t here = labels.at(static_cast<std::uint32_t>(pt.x), static_cast<std::uint32_t>(pt.y));
    if (id == 0) id = here;
    if (here != id) throw Error(Errc::mismatched_source, "polygon spans several components");
  }
  return labels.component_sizes[id - 1];
}

std::int64_t signed_area2(const Polygon& p) {
  std::int64_t sum = 0;
  const std::size_t n = p.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = p.points[i];
    const Point b = p.points[(i + 1) % n];
    sum += std::int64_t{a.x} * b.y - std::int64_t{b.x} * a.y;
  }
  return sum;
}

// ---------------------------------------------------------------------------

namespace {

// Local raster around one polygon with a one-cell margin, so the margin is
// always exterior and connects all of the outside.
class PolygonCanvas {
public:
  explicit PolygonCanvas(const Polygon& p) {
    std::int32_t x0 = std::numeric_limits<std::int32_t>::max();
    std::int32_t y0 = x0;
    std::int32_t x1 = std::numeric_limits<std::int32_t>::min();
    std::int32_t y1 = x1;
    for (const auto& pt : p.points) {
      x0 = std::min(x0, pt.x);
      y0 = std::min(y0, pt.y);
      x1 = std::max(x1, pt.x);
      y1 = std::max(y1, pt.y);
    }
    origin_ = {x0 - 1, y0 - 1};
    w_ = static_cast<std::int64_t>(x1) - x0 + 3;
    h_ = static_cast<std::int64_t>(y1) - y0 + 3;
    cells_.assign(static_cast<std::size_t>(w_ * h_), empty);
  }

  /// 8-connected digital segment, endpoints included.
  void draw_segment(Point a, Point b) {
    std::int64_t x = a.x - origin_.x;
    std::int64_t y = a.y - origin_.y;
    const std::int64_t tx = b.x - origin_.x;
    const std::int64_t ty = b.y - origin_.y;
    const std::int64_t dx = std::abs(tx - x);
    const std::int64_t dy = -std::abs(ty - y);
    const std::int64_t sx = x < tx ? 1 : -1;
    const std::int64_t sy = y < ty ? 1 : -1;
    std::int64_t err = dx + dy;
    for (;;) {
      cells_[static_cast<std::size_t>(y * w_ + x)] = boundary;
      if (x == tx && y == ty) break;
      const std::int64_t e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
    }
  }

  /// Span-based scan-line flood of the exterior from the margin corner,
  /// stepping 4-connected, so an 8-connected boundary chain seals it.
  void flood_exterior() {
    struct Seed {
      std::int64_t x, y;
    };
    std::vector<Seed> stack{{0, 0}};
    while (!stack.empty()) {
      const Seed s = stack.back();
      stack.pop_back();
      if (cell(s.x, s.y) != empty) continue;
      std::int64_t left = s.x;
      std::int64_t right = s.x;
      while (left > 0 && cell(left - 1, s.y) == empty) --left;
      while (right + 1 < w_ && cell(right + 1, s.y) == empty) ++right;
      for (std::int64_t x = left; x <= right; ++x) cell(x, s.y) = exterior;
      for (const std::int64_t ny : {s.y - 1, s.y + 1}) {
        if (ny < 0 || ny >= h_) continue;
        bool in_run = false;
        for (std::int64_t x = left; x <= right; ++x) {
          const bool open = cell(x, ny) == empty;
          if (open && !in_run) stack.push_back({x, ny});
          in_run = open;
        }
      }
    }
  }

  void paint_into(BinaryImage& out) const {
    for (std::int64_t y = 0; y < h_; ++y) {
      const std::int64_t gy = y + origin_.y;
      if (gy < 0 || gy >= out.height()) continue;
      for (std::int64_t x = 0; x < w_; ++x) {
        const std::int64_t gx = x + origin_.x;
        if (gx < 0 || gx >= out.width()) continue;
        if (cells_[static_cast<std::size_t>(y * w_ + x)] != exterior) {
          out.set(static_cast<std::uint32_t>(gx), static_cast<std::uint32_t>(gy), true);
        }
      }
    }
  }

private:
  static constexpr std::uint8_t empty = 0;
  static constexpr std::uint8_t boundary = 1;
  static constexpr std::uint8_t exterior = 2;

  std::uint8_t& cell(std::int64_t x, std::int64_t y) { return cells_[static_cast<std::size_t>(y * w_ + x)]; }

  Point origin_;
  std::int64_t w_ = 0;
  std::int64_t h_ = 0;
  std::vector<std::uint8_t> cells_;
};

}  // namespace

BinaryImage rasterize(const VectorScene& scene) {
  BinaryImage out(scene.width, scene.height);
  for (const auto& poly : scene.polygons) {
    if (poly.points.empty()) continue;
    PolygonCanvas canvas(poly);
    const std::size_t n = poly.points.size();
    for (std::size_t i = 0; i < n; ++i) canvas.draw_segment(poly.points[i], poly.points[(i + 1) % n]);
    canvas.flood_exterior();
    canvas.paint_into(out);
  }
  return out;
}

}  // namespace satvec

#include <doctest.h>

#include <random>
#include <set>

#include "satvec/error.hpp"
#include "satvec/pipeline.hpp"
#include "satvec/vector.hpp"
#include "support.hpp"

using namespace satvec;
using namespace satvec::testing;

namespace {

std::set<Pixel> point_set(const Polygon& p) {
  std::set<Pixel> out;
  for (auto pt : p.points) out.insert({pt.x, pt.y});
  return out;
}

bool chain_is_8_connected(const Polygon& p) {
  const std::size_t n = p.points.size();
  if (n == 1) return true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = p.points[i];
    const auto b = p.points[(i + 1) % n];
    const int dx = std::abs(a.x - b.x), dy = std::abs(a.y - b.y);
    if (std::max(dx, dy) != 1) return false;
  }
  return true;
}

/// Image with one bright block on deterministic dark noise.
RgbImage block_on_noise(std::uint32_t size, std::uint32_t bx, std::uint32_t by, std::uint32_t side) {
  std::mt19937_64 rng(8);
  RgbImage img(size, size);
  for (std::uint32_t y = 0; y < size; ++y)
    for (std::uint32_t x = 0; x < size; ++x) {
      const bool in = x >= bx && x < bx + side && y >= by && y < by + side;
      const auto v = static_cast<std::uint8_t>(in ? 200 + rng() % 56 : rng() % 60);
      auto px = img.data().subspan((std::size_t{y} * size + x) * 3, 3);
      px[0] = px[1] = px[2] = v;
    }
  return img;
}

}  // namespace

TEST_CASE("trace: empty image has no polygons") { CHECK(trace_outer_contours(BinaryImage(7, 4)).empty()); }

TEST_CASE("trace: 3x3 square at the origin") {
  BinaryImage m(5, 5);
  for (std::uint32_t y = 0; y < 3; ++y)
    for (std::uint32_t x = 0; x < 3; ++x) m.set(x, y, true);
  const auto polys = trace_outer_contours(m);
  REQUIRE(polys.size() == 1);
  // Boundary = all 9 pixels except the centre, clockwise from (0,0).
  const std::vector<Point> ring{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
  CHECK(polys[0].points == ring);
  CHECK(polys[0].area_px == 9);
  CHECK(polys[0].component_id == 1);
  CHECK(signed_area2(polys[0]) > 0);
}

TEST_CASE("trace: single pixel, lines and a diagonal") {
  BinaryImage dot(3, 3);
  dot.set(1, 1, true);
  auto polys = trace_outer_contours(dot);
  REQUIRE(polys.size() == 1);
  CHECK(polys[0].points == std::vector<Point>{{1, 1}});

  const auto line = mask_from_rows({"....", ".###", "...."});
  polys = trace_outer_contours(line);
  REQUIRE(polys.size() == 1);
  // Out along the line and back.
  CHECK(polys[0].points == std::vector<Point>{{1, 1}, {2, 1}, {3, 1}, {2, 1}});

  const auto diag = mask_from_rows({"#..", ".#.", "..#"});
  polys = trace_outer_contours(diag);
  REQUIRE(polys.size() == 1);
  CHECK(polys[0].points == std::vector<Point>{{0, 0}, {1, 1}, {2, 2}, {1, 1}});
}

TEST_CASE("trace: component ids follow first row-major pixel") {
  const auto m = mask_from_rows({
      "...##",
      "#..##",
      "#....",
  });
  const auto polys = trace_outer_contours(m);
  REQUIRE(polys.size() == 2);
  CHECK(polys[0].points.front() == Point{3, 0});
  CHECK(polys[0].area_px == 4);
  CHECK(polys[1].points.front() == Point{0, 1});
  CHECK(polys[1].area_px == 2);
}

TEST_CASE("trace: point sets equal the boundary-pixel oracle on hole-free masks") {
  std::mt19937_64 rng(123);
  for (int i = 0; i < 80; ++i) {
    const auto m = fill_holes(i % 2 ? random_blobs(rng, 40, 36, 5) : random_mask(rng, 40, 36, 0.15 + 0.01 * i));
    const auto polys = trace_outer_contours(m);
    const auto comps = bfs_components(m, 8);
    REQUIRE(polys.size() == comps.size());
    for (std::size_t k = 0; k < comps.size(); ++k) {
      REQUIRE(point_set(polys[k]) == boundary_pixels(m, comps[k]));
      REQUIRE(polys[k].area_px == comps[k].size());
      REQUIRE(polys[k].component_id == k + 1);
      REQUIRE(chain_is_8_connected(polys[k]));
      REQUIRE(signed_area2(polys[k]) >= 0);
    }
  }
}

TEST_CASE("polygon_pixel_area") {
  BinaryImage dot(3, 3);
  dot.set(0, 2, true);
  CHECK(polygon_pixel_area(trace_outer_contours(dot)[0], dot) == 1);

  BinaryImage sq(4, 4);
  for (std::uint32_t y = 1; y < 4; ++y)
    for (std::uint32_t x = 1; x < 4; ++x) sq.set(x, y, true);
  CHECK(polygon_pixel_area(trace_outer_contours(sq)[0], sq) == 9);

  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const auto m = random_mask(rng, 24, 24, 0.4);
    const auto polys = trace_outer_contours(m);
    const auto comps = bfs_components(m, 8);
    for (std::size_t k = 0; k < comps.size(); ++k) REQUIRE(polygon_pixel_area(polys[k], m) == comps[k].size());
  }

  Polygon stray{{{0, 0}}, 1, 1};
  CHECK_THROWS_AS(polygon_pixel_area(stray, BinaryImage(2, 2)), Error);
  Polygon spanning{{{0, 0}, {2, 0}}, 1, 2};
  CHECK_THROWS_AS(polygon_pixel_area(spanning, mask_from_rows({"#.#"})), Error);
}

TEST_CASE("rasterize") {
  CHECK(rasterize(VectorScene{6, 5, {}, {}, ""}) == BinaryImage(6, 5));

  BinaryImage block(6, 6);
  for (std::uint32_t y = 2; y < 5; ++y)
    for (std::uint32_t x = 1; x < 4; ++x) block.set(x, y, true);
  VectorScene scene{6, 6, trace_outer_contours(block), {}, ""};
  CHECK(rasterize(scene) == block);

  // Hand-written sparse ring: segments between distant vertices are drawn.
  VectorScene square{8, 8, {Polygon{{{1, 1}, {5, 1}, {5, 5}, {1, 5}}, 1, 25}}, {}, ""};
  const auto filled = rasterize(square);
  CHECK(filled.count() == 25);
  CHECK(filled.get(3, 3));
  CHECK_FALSE(filled.get(0, 0));

  // Polygons hanging off the canvas are clipped.
  VectorScene clipped{3, 3, {Polygon{{{-2, -2}, {1, -2}, {1, 1}, {-2, 1}}, 1, 16}}, {}, ""};
  CHECK(rasterize(clipped).count() == 4);
}

TEST_CASE("rasterize inverts trace on hole-free masks") {
  std::mt19937_64 rng(321);
  for (int i = 0; i < 80; ++i) {
    const auto m = fill_holes(i % 2 ? random_blobs(rng, 37, 41, 7) : random_mask(rng, 37, 41, 0.2 + 0.01 * i));
    VectorScene scene{m.width(), m.height(), trace_outer_contours(m), {}, ""};
    REQUIRE(rasterize(scene) == m);
  }
}

TEST_CASE("geojson") {
  VectorScene empty{10, 20, {}, {17}, "tile.png"};
  const auto text = to_geojson(empty);
  CHECK(text ==
        R"({"type":"FeatureCollection","properties":{"source_name":"tile.png","width":10,"height":20,)"
        R"("threshold_used":17,"coordinate_convention":"pixel-y-down"},"features":[]})"
        "\n");
  CHECK(from_geojson(text) == empty);

  VectorScene one{4, 4, {Polygon{{{1, 1}, {2, 1}, {2, 2}}, 1, 4}}, {90}, "a b \"quoted\" \xc3\xa7.png"};
  const auto t1 = to_geojson(one);
  CHECK(t1.find("[[[1,1],[2,1],[2,2],[1,1]]]") != std::string::npos);
  CHECK(from_geojson(t1) == one);
  CHECK(to_geojson(one) == t1);

  VectorScene single{3, 3, {Polygon{{{2, 2}}, 1, 1}}, {1}, "x"};
  CHECK(from_geojson(to_geojson(single)) == single);

  std::mt19937_64 rng(55);
  for (int i = 0; i < 20; ++i) {
    const auto m = random_mask(rng, 30, 30, 0.35);
    VectorScene s{30, 30, trace_outer_contours(m), {static_cast<std::uint8_t>(rng() % 256)}, "scene_" + std::to_string(i)};
    REQUIRE(from_geojson(to_geojson(s)) == s);
  }
}

TEST_CASE("from_geojson reports the offending path") {
  auto violation_of = [](std::string_view text) -> std::string {
    try {
      from_geojson(text);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::schema_violation);
      return e.what();
    }
    FAIL("expected SchemaViolation");
    return {};
  };
  const std::string good = to_geojson(VectorScene{4, 4, {Polygon{{{1, 1}, {2, 1}}, 1, 2}}, {9}, "n"});

  CHECK(violation_of("not json").find("not valid JSON") != std::string::npos);
  CHECK(violation_of(R"({"type":"Feature"})").find("/type") != std::string::npos);

  std::string open_ring = good;
  open_ring.replace(open_ring.find("[1,1]]]"), 7, "[2,2]]]");
  CHECK(violation_of(open_ring).find("/features/0/geometry/coordinates/0") != std::string::npos);

  std::string bad_coord = good;
  bad_coord.replace(bad_coord.find("[2,1]"), 5, "[2.5,1]");
  CHECK(violation_of(bad_coord).find("/features/0/geometry/coordinates/0/1/0") != std::string::npos);

  std::string no_area = good;
  no_area.replace(no_area.find(",\"area_px\":2"), 12, "");
  CHECK(violation_of(no_area).find("/features/0/properties/area_px") != std::string::npos);

  std::string bad_threshold = good;
  bad_threshold.replace(bad_threshold.find("\"threshold_used\":9"), 18, "\"threshold_used\":300");
  CHECK(violation_of(bad_threshold).find("/properties/threshold_used") != std::string::npos);
}

TEST_CASE("pipeline config") {
  const PipelineConfig cfg;
  CHECK(cfg.min_area_pre == 300);
  CHECK(cfg.min_area_post == 10000);
  CHECK(cfg.se_size == 3);
  CHECK(cfg.connectivity == Connectivity::eight);

  CHECK(config_to_json(cfg) == R"({"connectivity":8,"min_area_post":10000,"min_area_pre":300,"se_size":3})");
  CHECK(config_from_json(config_to_json(cfg)) == cfg);
  CHECK_THROWS_AS(config_from_json(R"({"connectivity":8,"min_area_post":1,"min_area_pre":1,"se_size":4})"), Error);
  CHECK_THROWS_AS(config_from_json(R"({"connectivity":6,"min_area_post":1,"min_area_pre":1,"se_size":3})"), Error);
  CHECK_THROWS_AS(config_from_json(R"({"min_area_post":1})"), Error);

  // 7000^2 leaves thresholds unchanged; 1024^2 scales 300 -> ceil(6.42) and
  // 10000 -> ceil(213.99); tiny images clamp at 1.
  CHECK(scaled_for_image(cfg, 7000, 7000) == cfg);
  const auto s1024 = scaled_for_image(cfg, 1024, 1024);
  CHECK(s1024.min_area_pre == 7);
  CHECK(s1024.min_area_post == 214);
  const auto s1 = scaled_for_image(cfg, 1, 1);
  CHECK(s1.min_area_pre == 1);
  CHECK(s1.min_area_post == 1);
}

TEST_CASE("vectorize_image: all black gives an empty scene") {
  const auto scene = vectorize_image(RgbImage(64, 64), PipelineConfig{}, "black");
  CHECK(scene.polygons.empty());
  CHECK(scene.width == 64);
  CHECK(scene.source_name == "black");
}

TEST_CASE("vectorize_image: bright block on dark noise") {
  const auto img = block_on_noise(512, 150, 100, 200);
  const PipelineConfig cfg{50, 1000, 3, Connectivity::eight};
  const auto scene = vectorize_image(img, cfg);
  REQUIRE(scene.polygons.size() == 1);
  CHECK(scene.threshold_used.level >= 59);
  CHECK(scene.threshold_used.level < 200);

  BinaryImage block(512, 512);
  for (std::uint32_t y = 100; y < 300; ++y)
    for (std::uint32_t x = 150; x < 350; ++x) block.set(x, y, true);
  const auto comps = bfs_components(block, 8);
  CHECK(point_set(scene.polygons[0]) == boundary_pixels(block, comps[0]));
  CHECK(scene.polygons[0].area_px == 200 * 200);
}

TEST_CASE("vectorize_image equals the staged composition") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 4; ++i) {
    RgbImage img(96, 80);
    for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng() % 256);
    const PipelineConfig cfg{5, 40, 3, i % 2 ? Connectivity::four : Connectivity::eight};
    const auto se = StructuringElement::square(3);

    const auto gray = to_grayscale(img);
    const auto t = otsu_threshold(gray);
    auto bw = binarize(gray, t);
    bw = area_open(bw, cfg.min_area_pre, cfg.connectivity);
    bw = morph_close(bw, se);
    bw = morph_open(bw, se);
    bw = fill_holes(bw);
    bw = area_open(bw, cfg.min_area_post, cfg.connectivity);
    const VectorScene manual{96, 80, trace_outer_contours(bw), t, "s"};

    REQUIRE(vectorize_image(img, cfg, "s") == manual);
    const auto traced = vectorize_image_traced(img, cfg, "s");
    REQUIRE(traced.scene == manual);
    REQUIRE(traced.post_opened == bw);
    REQUIRE(rasterize(traced.scene) == traced.post_opened);
    for (const auto& p : traced.scene.polygons) REQUIRE(p.area_px >= cfg.min_area_post);
    REQUIRE(traced.scene.polygons.size() == bfs_components(traced.post_opened, 8).size());
  }
}

TEST_CASE("vectorize_image rejects an even structuring element") {
  CHECK_THROWS_AS(vectorize_image(RgbImage(4, 4), PipelineConfig{1, 1, 2, Connectivity::eight}), Error);
}

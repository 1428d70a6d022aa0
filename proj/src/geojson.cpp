#include <limits>
#include <string>

#include <json.hpp>

#include "satvec/error.hpp"
#include "satvec/vector.hpp"

namespace satvec {

using ordered_json = nlohmann::ordered_json;

std::string to_geojson(const VectorScene& scene) {
  ordered_json features = ordered_json::array();
  for (const auto& poly : scene.polygons) {
    ordered_json ring = ordered_json::array();
    for (const auto& pt : poly.points) ring.push_back({pt.x, pt.y});
    if (!poly.points.empty()) ring.push_back({poly.points.front().x, poly.points.front().y});

    ordered_json feature;
    feature["type"] = "Feature";
    feature["properties"] = {{"component_id", poly.component_id}, {"area_px", poly.area_px}};
    feature["geometry"] = {{"type", "Polygon"}, {"coordinates", ordered_json::array({ring})}};
    features.push_back(std::move(feature));
  }

  ordered_json doc;
  doc["type"] = "FeatureCollection";
  doc["properties"] = {
      {"source_name", scene.source_name},
      {"width", scene.width},
      {"height", scene.height},
      {"threshold_used", scene.threshold_used.level},
      {"coordinate_convention", "pixel-y-down"},
  };
  doc["features"] = std::move(features);
  return doc.dump() + "\n";
}

namespace {

using json = nlohmann::json;

[[noreturn]] void violation(const std::string& path, const std::string& what) {
  throw Error(Errc::schema_violation, path + ": " + what);
}

const json& member(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) violation(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) violation(path + "/" + key, "missing");
  return *it;
}

std::int64_t integer(const json& v, const std::string& path, std::int64_t lo, std::int64_t hi) {
  if (!v.is_number_integer()) violation(path, "expected an integer");
  const std::int64_t n = v.get<std::int64_t>();
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(hi)) {
    violation(path, "out of range");
  }
  if (n < lo || n > hi) violation(path, "out of range");
  return n;
}

void expect_string(const json& v, const std::string& path, const char* expected) {
  if (!v.is_string() || v.get<std::string>() != expected) {
    violation(path, std::string("expected \"") + expected + "\"");
  }
}

constexpr std::int64_t i32_min = std::numeric_limits<std::int32_t>::min();
constexpr std::int64_t i32_max = std::numeric_limits<std::int32_t>::max();
constexpr std::int64_t u32_max = std::numeric_limits<std::uint32_t>::max();
constexpr std::int64_t i64_max = std::numeric_limits<std::int64_t>::max();

Polygon parse_feature(const json& feature, const std::string& path) {
  expect_string(member(feature, path, "type"), path + "/type", "Feature");
  const auto props_path = path + "/properties";
  const json& props = member(feature, path, "properties");

  Polygon poly;
  poly.component_id = static_cast<std::uint32_t>(
      integer(member(props, props_path, "component_id"), props_path + "/component_id", 0, u32_max));
  poly.area_px = static_cast<std::size_t>(
      integer(member(props, props_path, "area_px"), props_path + "/area_px", 0, i64_max));

  const auto geom_path = path + "/geometry";
  const json& geom = member(feature, path, "geometry");
  expect_string(member(geom, geom_path, "type"), geom_path + "/type", "Polygon");
  const auto coords_path = geom_path + "/coordinates";
  const json& coords = member(geom, geom_path, "coordinates");
  if (!coords.is_array() || coords.size() != 1) violation(coords_path, "expected exactly one ring");
  const json& ring = coords[0];
  const auto ring_path = coords_path + "/0";
  if (!ring.is_array() || ring.size() < 2) violation(ring_path, "ring needs at least 2 positions");

  for (std::size_t i = 0; i < ring.size(); ++i) {
    const auto pos_path = ring_path + "/" + std::to_string(i);
    const json& pos = ring[i];
    if (!pos.is_array() || pos.size() != 2) violation(pos_path, "expected [x, y]");
    poly.points.push_back({static_cast<std::int32_t>(integer(pos[0], pos_path + "/0", i32_min, i32_max)),
                           static_cast<std::int32_t>(integer(pos[1], pos_path + "/1", i32_min, i32_max))});
  }
  if (poly.points.front() != poly.points.back()) violation(ring_path, "ring is not closed");
  poly.points.pop_back();
  return poly;
}

}  // namespace

VectorScene from_geojson(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    violation("", std::string("not valid JSON (") + e.what() + ")");
  }

  expect_string(member(doc, "", "type"), "/type", "FeatureCollection");
  const json& props = member(doc, "", "properties");

  VectorScene scene;
  const json& name = member(props, "/properties", "source_name");
  if (!name.is_string()) violation("/properties/source_name", "expected a string");
  scene.source_name = name.get<std::string>();
  scene.width = static_cast<std::uint32_t>(integer(member(props, "/properties", "width"), "/properties/width", 0, u32_max));
  scene.height =
      static_cast<std::uint32_t>(integer(member(props, "/properties", "height"), "/properties/height", 0, u32_max));
  scene.threshold_used.level = static_cast<std::uint8_t>(
      integer(member(props, "/properties", "threshold_used"), "/properties/threshold_used", 0, 255));

  const json& features = member(doc, "", "features");
  if (!features.is_array()) violation("/features", "expected an array");
  for (std::size_t i = 0; i < features.size(); ++i) {
    scene.polygons.push_back(parse_feature(features[i], "/features/" + std::to_string(i)));
  }
  return scene;
}

}  // namespace satvec

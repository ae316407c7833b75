#include <lexreg/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include <lexreg/error.hpp>

#include <lexreg/csv.hpp>

namespace lexreg {

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double to_rad = std::numbers::pi / 180.0;
  double phi1 = lat1 * to_rad;
  double phi2 = lat2 * to_rad;
  double dphi = (lat2 - lat1) * to_rad;
  double dlambda = (lon2 - lon1) * to_rad;
  double s1 = std::sin(dphi / 2.0);
  double s2 = std::sin(dlambda / 2.0);
  double a = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  a = std::min(1.0, a);
  return 2.0 * earth_radius_km * std::asin(std::sqrt(a));
}

void validate_geometry(std::span<const unit_geometry> units) {
  std::unordered_set<std::string> seen;
  for (const auto& u : units) {
    require(std::isfinite(u.latitude) && std::abs(u.latitude) <= 90.0 && std::isfinite(u.longitude) &&
              std::abs(u.longitude) <= 180.0,
            errc::invalid_argument, "unit '" + u.unit_id + "' has out-of-range coordinates");
    require(seen.insert(u.unit_id).second, errc::invalid_argument, "duplicate unit_id '" + u.unit_id + "'");
  }
}

std::vector<unit_geometry> read_centroids(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), errc::io_error, "cannot open centroid file " + path.string());
  std::vector<unit_geometry> units;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = csv::split(line);
    if (line_no == 1 && !fields.empty() && fields[0] == "unit_id") continue;
    require(fields.size() == 3, errc::parse_error,
            path.string() + ":" + std::to_string(line_no) + ": expected unit_id,lat,lon");
    units.push_back({fields[0], csv::parse_double(fields[1]), csv::parse_double(fields[2])});
  }
  validate_geometry(units);
  return units;
}

void write_centroids(const std::filesystem::path& path, std::span<const unit_geometry> units) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_error, "cannot write " + path.string());
  out << "unit_id,lat,lon\n";
  for (const auto& u : units) {
    out << csv::quote(u.unit_id) << ',' << csv::format_double(u.latitude) << ','
        << csv::format_double(u.longitude) << '\n';
  }
}

std::vector<unit_geometry> align_geometry(std::span<const unit_geometry> units,
                                          std::span<const std::string> unit_ids) {
  std::unordered_map<std::string, const unit_geometry*> by_id;
  for (const auto& u : units) by_id.emplace(u.unit_id, &u);
  std::vector<unit_geometry> aligned;
  aligned.reserve(unit_ids.size());
  for (const auto& id : unit_ids) {
    auto it = by_id.find(id);
    require(it != by_id.end(), errc::order_mismatch, "no geometry for unit '" + id + "'");
    aligned.push_back(*it->second);
  }
  return aligned;
}

namespace {

bool in_ring(const ring& r, double lon, double lat) {
  bool inside = false;
  std::size_t n = r.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    auto [xi, yi] = r[i];
    auto [xj, yj] = r[j];
    if ((yi > lat) != (yj > lat) && lon < (xj - xi) * (lat - yi) / (yj - yi) + xi) inside = !inside;
  }
  return inside;
}

ring parse_ring(const nlohmann::json& coords) {
  ring r;
  for (const auto& p : coords) r.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return r;
}

std::vector<ring> parse_polygon(const nlohmann::json& coords) {
  std::vector<ring> rings;
  for (const auto& r : coords) rings.push_back(parse_ring(r));
  return rings;
}

}  // namespace

polygon_index::polygon_index(std::vector<unit_polygon> polygons) : polygons_(std::move(polygons)) {
  boxes_.reserve(polygons_.size());
  for (const auto& p : polygons_) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    bbox b{inf, inf, -inf, -inf};
    for (const auto& part : p.parts) {
      if (part.empty()) continue;
      for (auto [lon, lat] : part.front()) {
        b.min_lon = std::min(b.min_lon, lon);
        b.max_lon = std::max(b.max_lon, lon);
        b.min_lat = std::min(b.min_lat, lat);
        b.max_lat = std::max(b.max_lat, lat);
      }
    }
    boxes_.push_back(b);
  }
}

polygon_index polygon_index::from_geojson(const std::filesystem::path& path, const std::string& id_property) {
  std::ifstream in(path);
  require(in.good(), errc::io_error, "cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(errc::parse_error, path.string() + ": " + e.what());
  }
  std::vector<unit_polygon> polygons;
  try {
    for (const auto& feature : doc.at("features")) {
      unit_polygon poly;
      const auto& props = feature.value("properties", nlohmann::json::object());
      if (props.is_object() && props.contains(id_property)) {
        const auto& id = props.at(id_property);
        poly.unit_id = id.is_string() ? id.get<std::string>() : id.dump();
      } else if (feature.contains("id")) {
        const auto& id = feature.at("id");
        poly.unit_id = id.is_string() ? id.get<std::string>() : id.dump();
      } else {
        fail(errc::parse_error, path.string() + ": feature without '" + id_property + "'");
      }
      const auto& geom = feature.at("geometry");
      auto type = geom.at("type").get<std::string>();
      if (type == "Polygon") {
        poly.parts.push_back(parse_polygon(geom.at("coordinates")));
      } else if (type == "MultiPolygon") {
        for (const auto& p : geom.at("coordinates")) poly.parts.push_back(parse_polygon(p));
      } else {
        continue;
      }
      polygons.push_back(std::move(poly));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(errc::parse_error, path.string() + ": " + e.what());
  }
  return polygon_index(std::move(polygons));
}

std::optional<std::string> polygon_index::locate(double latitude, double longitude) const {
  for (std::size_t i = 0; i < polygons_.size(); ++i) {
    const auto& b = boxes_[i];
    if (longitude < b.min_lon || longitude > b.max_lon || latitude < b.min_lat || latitude > b.max_lat) continue;
    for (const auto& part : polygons_[i].parts) {
      if (part.empty() || !in_ring(part.front(), longitude, latitude)) continue;
      bool in_hole = false;
      for (std::size_t h = 1; h < part.size() && !in_hole; ++h) in_hole = in_ring(part[h], longitude, latitude);
      if (!in_hole) return polygons_[i].unit_id;
    }
  }
  return std::nullopt;
}

const unit_polygon* polygon_index::find(const std::string& unit_id) const {
  for (const auto& p : polygons_)
    if (p.unit_id == unit_id) return &p;
  return nullptr;
}

}  // namespace lexreg

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lexreg {

struct unit_geometry {
  std::string unit_id;
  double latitude = 0.0;
  double longitude = 0.0;
};

inline constexpr double earth_radius_km = 6371.0088;

double haversine_km(double lat1, double lon1, double lat2, double lon2);

inline double haversine_km(const unit_geometry& a, const unit_geometry& b) {
  return haversine_km(a.latitude, a.longitude, b.latitude, b.longitude);
}

// Checks coordinate ranges and unit_id uniqueness.
void validate_geometry(std::span<const unit_geometry> units);

// CSV with header `unit_id,lat,lon`.
std::vector<unit_geometry> read_centroids(const std::filesystem::path& path);
void write_centroids(const std::filesystem::path& path, std::span<const unit_geometry> units);

// Reorders `units` to follow `unit_ids`; every id must be present.
std::vector<unit_geometry> align_geometry(std::span<const unit_geometry> units,
                                          std::span<const std::string> unit_ids);

// A ring is a closed or open sequence of (lon, lat) vertices, GeoJSON order.
using ring = std::vector<std::pair<double, double>>;

struct unit_polygon {
  std::string unit_id;
  // Polygons of a MultiPolygon; each polygon is an outer ring followed by holes.
  std::vector<std::vector<ring>> parts;
};

class polygon_index {
 public:
  polygon_index() = default;
  explicit polygon_index(std::vector<unit_polygon> polygons);

  // GeoJSON FeatureCollection of Polygon/MultiPolygon features; the unit id is
  // taken from `id_property` (falling back to the feature "id").
  static polygon_index from_geojson(const std::filesystem::path& path,
                                    const std::string& id_property = "unit_id");

  // First polygon (in file order) containing the point.
  std::optional<std::string> locate(double latitude, double longitude) const;

  const std::vector<unit_polygon>& polygons() const { return polygons_; }
  const unit_polygon* find(const std::string& unit_id) const;

 private:
  struct bbox {
    double min_lon, min_lat, max_lon, max_lat;
  };
  std::vector<unit_polygon> polygons_;
  std::vector<bbox> boxes_;
};

}  // namespace lexreg

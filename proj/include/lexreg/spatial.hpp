#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include <lexreg/geometry.hpp>

namespace lexreg {

enum class weights_mode { knn, distance_band };

struct weights_descriptor {
  weights_mode mode = weights_mode::knn;
  int k = 10;
  double band_km = 100.0;

  // Only the parameter of the active mode takes part in comparison.
  friend bool operator==(const weights_descriptor& a, const weights_descriptor& b) {
    if (a.mode != b.mode) return false;
    return a.mode == weights_mode::knn ? a.k == b.k : a.band_km == b.band_km;
  }
};

nlohmann::json to_json(const weights_descriptor& d);
weights_descriptor weights_descriptor_from_json(const nlohmann::json& j);

// Binary spatial weights with self-inclusion. Row c lists the column indices
// c' with W[c, c'] = 1 in ascending order; c itself is always present.
struct proximity_matrix {
  std::vector<std::string> unit_ids;
  std::vector<std::vector<std::uint32_t>> neighbors;
  weights_descriptor descriptor;

  std::size_t size() const { return unit_ids.size(); }
  std::size_t row_sum(std::size_t c) const { return neighbors[c].size(); }
  bool contains(std::size_t c, std::size_t other) const;

  friend bool operator==(const proximity_matrix&, const proximity_matrix&) = default;
};

// W[c, c'] = 1 iff c' == c or c' is among the k nearest units to c by
// great-circle distance. Equal distances are resolved by unit_id order.
proximity_matrix knn_weights(std::span<const unit_geometry> units, int k);

// W[c, c'] = 1 iff c' == c or distance(c, c') <= band_km. Symmetric.
proximity_matrix distance_band_weights(std::span<const unit_geometry> units, double band_km);

proximity_matrix build_weights(std::span<const unit_geometry> units, const weights_descriptor& descriptor);

// CSV `unit_id,neighbor_id,weight` and a descriptor JSON.
void write_weights(const std::filesystem::path& csv_path, const std::filesystem::path& descriptor_path,
                   const proximity_matrix& weights);
proximity_matrix read_weights(const std::filesystem::path& csv_path, const std::filesystem::path& descriptor_path);

struct hotspot_matrix {
  std::vector<std::string> unit_ids;
  std::vector<std::string> vocabulary;
  // units x words G* z-scores.
  Eigen::MatrixXd values;
  // Per-word mean and population standard deviation over units.
  Eigen::VectorXd means;
  Eigen::VectorXd stddevs;
};

// Local Getis-Ord G* z-scores for every (unit, word):
//
//   G*[c, w] = sum_c' W[c, c'] (f[c', w] - mean_w)
//              / (sd_w * sqrt((N sum_c' W[c, c']^2 - (sum_c' W[c, c'])^2) / (N - 1)))
//
// mean_w and sd_w are the unweighted mean and population standard deviation
// of the N unit frequencies. Constant columns are all zero, as are rows whose
// neighborhood covers every unit (the variance term vanishes).
hotspot_matrix getis_ord(const Eigen::MatrixXd& frequencies, std::span<const std::string> unit_ids,
                         std::span<const std::string> vocabulary, const proximity_matrix& weights);

void write_hotspots(const std::filesystem::path& path, const hotspot_matrix& hotspots);
hotspot_matrix read_hotspots(const std::filesystem::path& path);

// Single-word extraction as CSV `unit_id,gstar`.
void write_word_column(const std::filesystem::path& path, const hotspot_matrix& hotspots, const std::string& word);

}  // namespace lexreg

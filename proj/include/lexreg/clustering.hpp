#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <lexreg/geometry.hpp>
#include <lexreg/spatial.hpp>

namespace lexreg {

// Node ids follow the usual dendrogram convention: leaves are 0..n-1 and the
// node created by merge i is n + i. left < right in every record.
struct merge_record {
  std::size_t left;
  std::size_t right;
  double distance;
  std::size_t size;

  friend bool operator==(const merge_record&, const merge_record&) = default;
};

struct linkage_tree {
  std::size_t n_leaves = 0;
  std::vector<merge_record> merges;
  // Leaves in dendrogram order (left subtree first).
  std::vector<std::size_t> leaf_order;
};

// Agglomerative Ward clustering on Euclidean distances. Merge heights use the
// convention where two singletons merge at their Euclidean distance:
//   d(A, B) = sqrt(2 |A| |B| / (|A| + |B|)) * |centroid(A) - centroid(B)|
// maintained by the Lance-Williams recurrence. Equal heights are resolved by
// the smaller (left, right) node-id pair.
linkage_tree ward_linkage(const Eigen::MatrixXd& points);

struct cluster_assignment {
  int n_clusters = 0;
  // 1..n_clusters, numbered by first occurrence in unit order.
  std::vector<int> labels;
  std::vector<std::string> unit_ids;

  // Zero-based member indices of 1-based cluster `label`.
  std::vector<std::size_t> members(int label) const;
};

std::vector<int> canonicalize_labels(std::span<const int> labels);

// Undoes the last n_clusters - 1 merges.
cluster_assignment cut_tree(const linkage_tree& tree, int n_clusters);

// Mean silhouette width; singletons contribute 0, as do points with a = b = 0.
double silhouette(const Eigen::MatrixXd& points, const cluster_assignment& assignment);
// Same, from a precomputed symmetric distance matrix.
double silhouette_from_distances(const Eigen::MatrixXd& distances, std::span<const int> labels, int n_clusters);

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& points);

struct sweep_entry {
  int n_clusters;
  double score;
};

std::vector<sweep_entry> silhouette_sweep(const linkage_tree& tree, const Eigen::MatrixXd& points, int n_min = 2,
                                          int n_max = 15);

struct specificity_table {
  std::vector<std::string> vocabulary;
  int n_clusters = 0;
  // clusters x words mean G*.
  Eigen::MatrixXd cluster_means;
  // clusters x words; S[C, w] = min over C' != C of (m[C, w] - m[C', w])^2.
  Eigen::MatrixXd values;
  // clusters x words; sign of m[C, w] - m[nearest C', w] (-1, 0, +1).
  Eigen::MatrixXi signs;
  // Per cluster, word indices by decreasing S (ties by vocabulary index).
  std::vector<std::vector<std::size_t>> ranked;
};

specificity_table specificity(const hotspot_matrix& hotspots, const cluster_assignment& assignment);

struct characteristic_word {
  std::string word;
  double specificity;
  int sign;
};

// `cluster` is 1-based.
std::vector<characteristic_word> characteristic_words(const specificity_table& table, int cluster, int k);

double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

// CSV `step,left,right,distance,size`.
void write_linkage(const std::filesystem::path& path, const linkage_tree& tree);
linkage_tree read_linkage(const std::filesystem::path& path);

// CSV `unit_id,cluster`.
void write_assignment(const std::filesystem::path& path, const cluster_assignment& assignment);
cluster_assignment read_assignment(const std::filesystem::path& path);

// FeatureCollection with a `cluster` property per unit: polygon geometry when
// the unit is found in `polygons`, otherwise a Point at its centroid.
void write_assignment_geojson(const std::filesystem::path& path, const cluster_assignment& assignment,
                              std::span<const unit_geometry> centroids, const polygon_index* polygons = nullptr);

// CSV `rank,word,specificity,sign` for one 1-based cluster, k rows at most.
void write_specificity(const std::filesystem::path& path, const specificity_table& table, int cluster,
                       std::size_t k);

void write_sweep(const std::filesystem::path& path, std::span<const sweep_entry> sweep);

}  // namespace lexreg

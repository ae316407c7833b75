#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <lexreg/spatial.hpp>

namespace lexreg {

struct pc_model {
  std::vector<std::string> unit_ids;
  std::vector<std::string> vocabulary;
  Eigen::VectorXd column_means;
  // components x words, orthonormal rows.
  Eigen::MatrixXd loadings;
  Eigen::VectorXd singular_values;
  Eigen::VectorXd explained_variance_ratio;
  // units x components; (data - means) * loadings^T.
  Eigen::MatrixXd scores;
  // Broken-stick expectations used for the selection (one per word).
  std::vector<double> broken_stick;
  int n_selected = 0;
  // Set when the broken-stick rule kept nothing and the one-component floor applied.
  bool floor_applied = false;

  Eigen::Index n_components() const { return loadings.rows(); }
  double cumulative_ratio(int m) const;
  // First n_selected score columns.
  Eigen::MatrixXd selected_scores() const;
};

// Mean-centered PCA through a thin SVD. Components follow decreasing singular
// value and are signed so the largest-magnitude loading is positive. The number
// of retained components is chosen with the broken-stick rule over
// data.cols() parts.
pc_model fit_pca(const Eigen::MatrixXd& data);
pc_model fit_pca(const hotspot_matrix& hotspots);

// b_k = (1/n) sum_{i=k}^{n} 1/i, k = 1..n.
std::vector<double> broken_stick(int n_parts);

// Largest m with evr_k > stick_k for every k <= m; at least 1.
int select_components(std::span<const double> evr, std::span<const double> stick);

struct loading_entry {
  std::string word;
  double loading;
};

struct loading_extremes {
  std::vector<loading_entry> positive;
  std::vector<loading_entry> negative;
};

// `component` is 1-based and must not exceed n_selected.
loading_extremes top_loadings(const pc_model& model, int component, int k);

// JSON header plus two matrix files (loadings, scores).
void write_pc_model(const std::filesystem::path& header_path, const std::filesystem::path& loadings_path,
                    const std::filesystem::path& scores_path, const pc_model& model);
pc_model read_pc_model(const std::filesystem::path& header_path, const std::filesystem::path& loadings_path,
                       const std::filesystem::path& scores_path);

// `word,loading` and `unit_id,score` for one 1-based component.
void write_component_loadings(const std::filesystem::path& path, const pc_model& model, int component);
void write_component_scores(const std::filesystem::path& path, const pc_model& model, int component);

}  // namespace lexreg
